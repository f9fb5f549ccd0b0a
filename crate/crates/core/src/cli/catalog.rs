//! Built-in problems as run documents.

use serde_json::{json, Value};

pub const NAMES: [&str; 4] = ["hayes", "ode", "re-basic", "delayed-mathieu"];

/// The document for a catalog name.
pub fn document(name: &str) -> Option<Value> {
    let doc = match name {
        // x'(t) = -(π/2) x(t - 1); characteristic roots ±iπ/2
        "hayes" => json!({
            "problem": {"kind": "rfde", "dim": 1, "max_delay": 1.0,
                        "discrete": [{"delay": 1.0, "B": [["-(pi/2)"]]}]},
            "disc": {"M": 21, "N": 20, "h": 1.0, "s": 0.0, "method": "collocation"},
            "run": {"n_list": [5, 10, 15, 20, 25],
                    "reference": {"kind": "char-roots",
                                  "region": {"re": [-1.0, 1.0], "im": [0.0, 2.0], "grid": [6, 6]}}}
        }),
        // x' = -x, embedded with a unit history window
        "ode" => json!({
            "problem": {"kind": "rfde", "dim": 1, "max_delay": 1.0, "A": [[-1.0]]},
            "disc": {"M": 11, "N": 10, "h": 1.0, "s": 0.0, "method": "collocation"},
            "run": {"n_list": [2, 3, 4, 5, 6, 7, 8, 10, 12],
                    "reference": {"kind": "value", "re": (-1.0f64).exp(), "im": 0.0}}
        }),
        // x(t) = ∫_{-3}^{-1} x(t+θ)/2 dθ; characteristic root 0
        "re-basic" => json!({
            "problem": {"kind": "re", "dim": 1, "max_delay": 3.0,
                        "kernels": [{"support": [-3.0, -1.0], "C": [[0.5]]}]},
            "disc": {"M": 21, "N": 20, "h": 3.0, "s": 0.0, "method": "collocation"},
            "run": {"n_list": [5, 10, 15, 20],
                    "reference": {"kind": "char-roots",
                                  "region": {"re": [-0.5, 0.5], "im": [-0.5, 0.5], "grid": [5, 5]}}}
        }),
        // x'(t) = (a + b cos 2πt) x(t) + c x(t - 1)
        "delayed-mathieu" => json!({
            "problem": {"kind": "rfde", "dim": 1, "max_delay": 1.0,
                        "A": [["-0.5 + 0.5*cos(2*pi*t)"]],
                        "discrete": [{"delay": 1.0, "B": [[-1.0]]}],
                        "period": 1.0},
            "disc": {"M": 25, "N": 24, "h": 1.0, "s": 0.0, "method": "collocation"},
            "run": {"n_list": [8, 12, 16, 20, 24],
                    "reference": {"kind": "bruteforce", "M": 24, "steps": 4096}}
        }),
        _ => return None,
    };
    Some(doc)
}

/// `base` with every top-level section present in `overrides` replaced.
pub fn merge(base: Value, overrides: Value) -> Value {
    match (base, overrides) {
        (Value::Object(mut b), Value::Object(o)) => {
            for (k, v) in o {
                b.insert(k, v);
            }
            Value::Object(b)
        }
        (_, o) => o,
    }
}
