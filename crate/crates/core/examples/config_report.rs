//! Runs an experiment from a TOML configuration and prints its CSV report.
//!
//! ```text
//! cargo run --example config_report -- path/to/experiment.toml
//! ```

use std::path::Path;

use hermitian_bergman::config::ExperimentConfig;
use hermitian_bergman::runner::{run, run_config};

const DEFAULT: &str = r#"
kind = "geometry-verify"
seed = 7
points = 40
metric = { name = "fubini-study", n = 3 }

[tolerances]
torsion = 1e-10
"#;

fn main() {
    let report = match std::env::args().nth(1) {
        Some(path) => run_config(Path::new(&path)),
        None => ExperimentConfig::from_toml_str(DEFAULT).and_then(|cfg| run(&cfg)),
    }
    .unwrap_or_else(|e| {
        eprintln!("configuration error: {e}");
        std::process::exit(2);
    });
    print!("{}", report.to_csv().unwrap());
    println!("exit code {}", report.exit_code());
}
