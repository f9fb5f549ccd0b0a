use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delay-spectra"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|f| f.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn eig_hayes_finds_i() {
    let o = bin(&["eig", "--problem", "hayes"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("index,re,im,modulus,residual\n"));
    let top = &data_rows(&out)[0];
    assert!(top[1].abs() < 1e-8 && (top[2].abs() - 1.0).abs() < 1e-8, "{top:?}");
}

#[test]
fn converge_ode_is_monotone() {
    let o = bin(&["converge", "--problem", "ode"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let errors: Vec<f64> = data_rows(&out).iter().map(|r| r[4]).collect();
    let above: Vec<f64> = errors.iter().copied().take_while(|&e| e > 1e-13).collect();
    assert!(above.len() >= 3);
    assert!(above.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    let order: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# order_estimate,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(order < -5.0, "{order}");
}

#[test]
fn compare_hayes_agrees() {
    let o = bin(&["compare", "--problem", "hayes"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("index,collocation_re,collocation_im,weighted_re,weighted_im,delta\n"));
    let max: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# max_delta,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(max <= 1e-6);
}

#[test]
fn compare_rejects_renewal_equations() {
    let o = bin(&["compare", "--problem", "re-basic"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = bin(&["eig", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"problem":{"kind":"rfde","dim":1,"max_delay":1,"bogus":1},"disc":{"M":3,"N":2,"h":1}}"#,
    )
    .unwrap();
    let o = bin(&["eig", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("problem.bogus"), "{}", stderr(&o));

    let o = bin(&["eig", "--problem", "nope"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bin(&["eig"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_directory_receives_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["oracle", "--problem", "hayes", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    for name in ["roots.csv", "bruteforce.csv"] {
        assert!(Path::new(&dir.path().join(name)).exists(), "{name}");
    }
    let roots = fs::read_to_string(dir.path().join("roots.csv")).unwrap();
    let first = &data_rows(&roots)[0];
    assert!((first[2] - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
}

#[test]
fn output_is_reproducible() {
    for cmd in ["eig", "check"] {
        let a = bin(&[cmd, "--problem", "ode", "--seed", "7"]);
        let b = bin(&[cmd, "--problem", "ode", "--seed", "7"]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn check_passes_on_hayes() {
    let o = bin(&["check", "--problem", "hayes"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("invariant,status,value,tolerance,note\n"));
    assert!(!out.contains(",fail,"));
}

#[test]
fn config_overrides_catalog_sections() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("disc.json");
    fs::write(&cfg, r#"{"disc":{"M":7,"N":6,"h":1.0}}"#).unwrap();
    let o = bin(&["eig", "--problem", "hayes", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // order (M + 1) d
    assert_eq!(data_rows(&stdout(&o)).len(), 8);
}
