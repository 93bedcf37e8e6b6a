//! The twisted integral identity for a compactly supported (0,1)-form,
//! evaluated by tensor Gauss-Legendre quadrature at increasing resolution.

use hermitian_bergman::config::{ExperimentConfig, ExperimentKind, RegistrySpec};
use hermitian_bergman::runner::run;

fn main() {
    for metric in ["euclidean", "hopf"] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Bkmkh);
        cfg.metric = Some(RegistrySpec::named(metric).with_n(2));
        cfg.resolutions = Some(vec![16, 24, 32]);
        let report = run(&cfg).unwrap();
        println!("{metric}:");
        for c in &report.checks {
            println!("  {:<28} {:.3e} {}", c.name, c.value, if c.pass { "ok" } else { "FAIL" });
        }
    }
}
