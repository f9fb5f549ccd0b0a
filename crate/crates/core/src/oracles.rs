//! Independent references: characteristic roots of autonomous problems and
//! monodromy matrices obtained by direct time integration.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::grids::{chebyshev_extrema, clenshaw_curtis, GridError, NodeSet, QuadRule};
use crate::problems::{characteristic_matrix, ProblemError, ProblemKind, ProblemSpec};

/// Minimum number of time steps accepted by [`monodromy_bruteforce`].
pub const MIN_STEPS: usize = 64;

const NEWTON_MAX_ITER: usize = 100;
const DEDUP_TOL: f64 = 1e-8;
const KERNEL_QUAD_POINTS: usize = 32;
const BLOWUP: f64 = 1e150;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("root search region needs re_min < re_max, im_min < im_max and at least 2 starts per axis")]
    BadRegion,
    #[error("brute force needs at least {MIN_STEPS} steps, got {0}")]
    TooFewSteps(usize),
    #[error("step h must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("time integration blew up with {steps} steps")]
    Unstable { steps: usize },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Rectangle of the complex plane with a grid of Newton starting points.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSearchRegion {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub grid: (usize, usize),
}

impl RootSearchRegion {
    pub fn new(re_range: (f64, f64), im_range: (f64, f64), grid: (usize, usize)) -> Result<Self, OracleError> {
        let r = RootSearchRegion {
            re_range,
            im_range,
            grid,
        };
        r.check()?;
        Ok(r)
    }

    fn check(&self) -> Result<(), OracleError> {
        let ok = self.re_range.0 < self.re_range.1
            && self.im_range.0 < self.im_range.1
            && self.grid.0 >= 2
            && self.grid.1 >= 2
            && [self.re_range.0, self.re_range.1, self.im_range.0, self.im_range.1]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(OracleError::BadRegion)
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let tol_re = 1e-10 * (self.re_range.1 - self.re_range.0);
        let tol_im = 1e-10 * (self.im_range.1 - self.im_range.0);
        z.re >= self.re_range.0 - tol_re
            && z.re <= self.re_range.1 + tol_re
            && z.im >= self.im_range.0 - tol_im
            && z.im <= self.im_range.1 + tol_im
    }

    /// Starting points, row by row.
    pub fn starts(&self) -> Vec<Complex64> {
        let (nr, ni) = self.grid;
        let lerp = |(a, b): (f64, f64), k: usize, n: usize| a + (b - a) * k as f64 / (n - 1) as f64;
        (0..ni)
            .flat_map(|j| (0..nr).map(move |i| Complex64::new(lerp(self.re_range, i, nr), lerp(self.im_range, j, ni))))
            .collect()
    }
}

fn char_det(p: &ProblemSpec, lambda: Complex64) -> Result<Complex64, ProblemError> {
    Ok(characteristic_matrix(p, lambda)?.determinant())
}

fn newton(p: &ProblemSpec, start: Complex64, span: f64) -> Result<Option<Complex64>, ProblemError> {
    let d = p.dim as i32;
    let mut z = start;
    for _ in 0..NEWTON_MAX_ITER {
        let f = char_det(p, z)?;
        let step = 1e-7 * (1.0 + z.norm());
        let fp = (char_det(p, z + step)? - char_det(p, z - step)?) / (2.0 * step);
        if f.norm() == 0.0 {
            return Ok(Some(z));
        }
        if fp.norm() == 0.0 || !fp.is_finite() {
            break;
        }
        let delta = f / fp;
        z -= delta;
        if !z.is_finite() || (z - start).norm() > 10.0 * span {
            return Ok(None);
        }
        if delta.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let f = char_det(p, z)?;
    Ok((f.norm() <= 1e-12 * (1.0 + z.norm()).powi(d)).then_some(z))
}

/// Roots of `det Δ(λ)` inside `region`, found by Newton's method from every
/// grid start, deduplicated and sorted by descending real part.
pub fn char_roots(p: &ProblemSpec, region: &RootSearchRegion) -> Result<Vec<Complex64>, OracleError> {
    region.check()?;
    char_roots_from(p, region, &region.starts())
}

/// As [`char_roots`] with explicit starting points. The result does not depend
/// on their order.
pub fn char_roots_from(
    p: &ProblemSpec,
    region: &RootSearchRegion,
    starts: &[Complex64],
) -> Result<Vec<Complex64>, OracleError> {
    region.check()?;
    if !p.is_autonomous() {
        return Err(ProblemError::NonAutonomous.into());
    }
    let span = (region.re_range.1 - region.re_range.0).max(region.im_range.1 - region.im_range.0);
    let mut found = Vec::new();
    for &z0 in starts {
        if let Some(z) = newton(p, z0, span)? {
            if region.contains(z) {
                found.push(z);
            }
        }
    }
    found.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let mut roots: Vec<Complex64> = Vec::new();
    for z in found {
        if roots.iter().all(|r| (r - z).norm() > DEDUP_TOL) {
            roots.push(z);
        }
    }
    Ok(roots)
}

/// History basis of the brute force: one cardinal polynomial per X-grid slot
/// and component, laid out as `slot · d + component`.
struct History {
    grid: NodeSet,
    dim: usize,
    slot_of_node: Vec<usize>,
}

impl History {
    fn new(tau: f64, m: usize, dim: usize) -> Result<History, GridError> {
        let grid = chebyshev_extrema(m, -tau, 0.0)?;
        let slot_of_node = (0..=m).map(|j| m - j).collect();
        Ok(History {
            grid,
            dim,
            slot_of_node,
        })
    }

    fn cols(&self) -> usize {
        self.dim * self.grid.len()
    }

    /// `Φ(θ)` as a `d × cols` matrix.
    fn eval(&self, theta: f64) -> DMatrix<f64> {
        let d = self.dim;
        let mut out = DMatrix::zeros(d, self.cols());
        for (j, c) in self.grid.cardinal_values(theta).into_iter().enumerate() {
            let s = self.slot_of_node[j];
            for k in 0..d {
                out[(k, s * d + k)] = c;
            }
        }
        out
    }

    fn slot_nodes(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (j, &x) in self.grid.nodes().iter().enumerate() {
            out[self.slot_of_node[j]] = x;
        }
        out
    }
}

/// Monodromy-type matrix of `U(h, 0)` on the single-piece X grid of index `m`,
/// obtained by integrating every cardinal history with `steps` uniform steps.
pub fn monodromy_bruteforce(p: &ProblemSpec, h: f64, m: usize, steps: usize) -> Result<DMatrix<f64>, OracleError> {
    monodromy_bruteforce_at(p, 0.0, h, m, steps)
}

/// As [`monodromy_bruteforce`] for `U(s + h, s)`.
pub fn monodromy_bruteforce_at(
    p: &ProblemSpec,
    s: f64,
    h: f64,
    m: usize,
    steps: usize,
) -> Result<DMatrix<f64>, OracleError> {
    if steps < MIN_STEPS {
        return Err(OracleError::TooFewSteps(steps));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(OracleError::BadStep(h));
    }
    let hist = History::new(p.max_delay, m, p.dim)?;
    let d = p.dim;
    let mut out = DMatrix::zeros(hist.cols(), hist.cols());
    match p.kind {
        ProblemKind::Rfde => {
            let run = Rk4Run::integrate(p, &hist, s, h, steps)?;
            for (slot, theta) in hist.slot_nodes().into_iter().enumerate() {
                out.rows_mut(slot * d, d).copy_from(&run.lookup(h + theta));
            }
        }
        ProblemKind::Re => {
            let run = VieRun::integrate(p, &hist, s, h, steps)?;
            for (slot, theta) in hist.slot_nodes().into_iter().enumerate() {
                out.rows_mut(slot * d, d).copy_from(&run.lookup(h + theta));
            }
        }
    }
    Ok(out)
}

fn check_finite(x: &DMatrix<f64>, steps: usize) -> Result<(), OracleError> {
    if x.iter().all(|v| v.is_finite() && v.abs() < BLOWUP) {
        Ok(())
    } else {
        Err(OracleError::Unstable { steps })
    }
}

/// Sub-intervals of `[lo, hi]` cut at the given points.
fn split(lo: f64, hi: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let tiny = 1e-14 * (hi - lo).abs().max(1.0);
    let mut pts = vec![lo];
    pts.extend(cuts.iter().copied().filter(|&c| c > lo + tiny && c < hi - tiny));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// RK4 solution with a cubic Hermite dense output.
struct Rk4Run<'a> {
    hist: &'a History,
    dt: f64,
    xs: Vec<DMatrix<f64>>,
    fs: Vec<DMatrix<f64>>,
}

impl<'a> Rk4Run<'a> {
    fn integrate(p: &ProblemSpec, hist: &'a History, s: f64, h: f64, steps: usize) -> Result<Self, OracleError> {
        let dt = h / steps as f64;
        let rule = clenshaw_curtis(KERNEL_QUAD_POINTS, -1.0, 1.0)?;
        let mut run = Rk4Run {
            hist,
            dt,
            xs: vec![hist.eval(0.0)],
            fs: Vec::new(),
        };
        let f0 = run.rhs(p, &rule, s, 0.0, &run.xs[0])?;
        run.fs.push(f0);
        for n in 0..steps {
            let t = n as f64 * dt;
            let x = &run.xs[n];
            let k1 = run.fs[n].clone();
            let k2 = run.rhs(p, &rule, s, t + dt / 2.0, &(x + &k1 * (dt / 2.0)))?;
            let k3 = run.rhs(p, &rule, s, t + dt / 2.0, &(x + &k2 * (dt / 2.0)))?;
            let k4 = run.rhs(p, &rule, s, t + dt, &(x + &k3 * dt))?;
            let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            check_finite(&next, steps)?;
            run.xs.push(next);
            let f = run.rhs(p, &rule, s, t + dt, &run.xs[n + 1])?;
            run.fs.push(f);
        }
        Ok(run)
    }

    fn known_until(&self) -> f64 {
        (self.xs.len() - 1) as f64 * self.dt
    }

    /// `x(t)`: the history for `t <= 0`, Hermite interpolation on computed
    /// steps, and extrapolation of the last step beyond them.
    fn lookup(&self, t: f64) -> DMatrix<f64> {
        if t <= 0.0 {
            return self.hist.eval(t);
        }
        let last = self.xs.len() - 1;
        if last == 0 {
            return &self.xs[0] + &self.fs[0] * t;
        }
        let k = ((t / self.dt).floor() as usize).min(last - 1);
        let u = (t - k as f64 * self.dt) / self.dt;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u).powi(2),
            u * (1.0 - u).powi(2),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        &self.xs[k] * h00 + &self.fs[k] * (h10 * self.dt) + &self.xs[k + 1] * h01 + &self.fs[k + 1] * (h11 * self.dt)
    }

    fn rhs(
        &self,
        p: &ProblemSpec,
        rule: &QuadRule,
        s: f64,
        t: f64,
        x: &DMatrix<f64>,
    ) -> Result<DMatrix<f64>, OracleError> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        if let Some(a) = &p.a {
            out += a.eval(s + t)? * x;
        }
        for term in &p.discrete {
            out += term.coeff.eval(s + t)? * self.lookup(t - term.delay);
        }
        for k in &p.kernels {
            let (lo, hi) = k.support;
            for (a, b) in split(lo, hi, &[-t, self.known_until() - t]) {
                let r = rule.mapped(a, b);
                for (&theta, &w) in r.points.iter().zip(&r.weights) {
                    out += k.coeff.eval_kernel(s + t, theta)? * self.lookup(t + theta) * w;
                }
            }
        }
        Ok(out)
    }
}

/// Trapezoidal time stepping of the Volterra form of a renewal equation on a
/// uniform grid; the solution is piecewise linear between grid values.
struct VieRun<'a> {
    hist: &'a History,
    dt: f64,
    xs: Vec<DMatrix<f64>>,
}

impl<'a> VieRun<'a> {
    fn integrate(p: &ProblemSpec, hist: &'a History, s: f64, h: f64, steps: usize) -> Result<Self, OracleError> {
        let dt = h / steps as f64;
        let rule = clenshaw_curtis(KERNEL_QUAD_POINTS, -1.0, 1.0)?;
        let d = p.dim;
        let mut run = VieRun {
            hist,
            dt,
            xs: Vec::with_capacity(steps + 1),
        };
        for n in 0..=steps {
            let t = n as f64 * dt;
            let mut known = DMatrix::zeros(d, hist.cols());
            let mut implicit = DMatrix::<f64>::zeros(d, d);
            for k in &p.kernels {
                let (lo, hi) = k.support;
                // history part: t + θ < 0
                if lo < -t {
                    for (a, b) in split(lo, hi.min(-t), &[]) {
                        let r = rule.mapped(a, b);
                        for (&theta, &w) in r.points.iter().zip(&r.weights) {
                            known += k.coeff.eval_kernel(s + t, theta)? * hist.eval(t + theta) * w;
                        }
                    }
                }
                // solution part: u = t + θ in [a, b] ⊂ [0, t]
                let a = (t + lo).max(0.0);
                let b = (t + hi).min(t);
                if b > a {
                    let first = (a / dt).floor() as usize;
                    let mut j = first;
                    while (j as f64) * dt < b {
                        let u0 = (j as f64 * dt).max(a);
                        let u1 = ((j + 1) as f64 * dt).min(b);
                        if u1 > u0 {
                            let half = (u1 - u0) / 2.0;
                            for u in [u0, u1] {
                                let c = k.coeff.eval_kernel(s + t, u - t)? * half;
                                if n > 0 && (u - t).abs() <= 1e-12 * dt && j + 1 == n {
                                    implicit += c;
                                } else {
                                    known += c * run.linear(u, j);
                                }
                            }
                        }
                        j += 1;
                    }
                }
            }
            let lhs = DMatrix::identity(d, d) - implicit;
            let x = lhs.lu().solve(&known).ok_or(OracleError::Unstable { steps })?;
            check_finite(&x, steps)?;
            run.xs.push(x);
        }
        Ok(run)
    }

    /// Linear interpolation of computed values on `[t_j, t_{j+1}]`.
    fn linear(&self, u: f64, j: usize) -> DMatrix<f64> {
        let last = self.xs.len() - 1;
        if j >= last {
            return self.xs[last].clone();
        }
        let w = (u / self.dt - j as f64).clamp(0.0, 1.0);
        &self.xs[j] * (1.0 - w) + &self.xs[j + 1] * w
    }

    fn lookup(&self, t: f64) -> DMatrix<f64> {
        if t < 0.0 {
            return self.hist.eval(t);
        }
        let j = ((t / self.dt).floor() as usize).min(self.xs.len().saturating_sub(2));
        self.linear(t, j)
    }
}
