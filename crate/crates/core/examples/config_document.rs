//! A run document parsed, executed and serialized back.

use delay_spectra::cli::config::{parse_config, serialize};
use delay_spectra::cli::{execute, Command};

const DOC: &str = r#"{
  "problem": {"kind": "rfde", "dim": 1, "max_delay": 1.0,
              "A": [["-0.5 + 0.5*cos(2*pi*t)"]],
              "discrete": [{"delay": 1.0, "B": [[-1.0]]}],
              "period": 1.0},
  "disc": {"M": 17, "N": 16, "h": 1.0},
  "run": {"n_list": [6, 8, 10, 12], "reference": {"kind": "bruteforce", "M": 20, "steps": 1024}}
}"#;

fn main() {
    let spec = parse_config(DOC).unwrap();
    println!("{}", serialize(&spec));
    let report = execute(Command::Converge, &spec, 0).unwrap();
    for a in &report.artifacts {
        println!("== {}\n{}", a.name, a.content);
    }
    for m in &report.messages {
        println!("{m}");
    }
}
