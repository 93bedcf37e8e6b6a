use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hermitian_bergman::config::{ExperimentConfig, ExperimentKind, Format, RegistrySpec};
use hermitian_bergman::report::{ErrorRecord, RunReport};
use hermitian_bergman::runner;
use hermitian_bergman::Error;

#[derive(Parser)]
#[command(name = "hbergman", version, about = "Run geometry, curvature-condition and Bergman-projection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature-condition sweep over exponents (default: product domain, n = 2).
    CheckDf(Common),
    /// Pointwise geometry checks (default: Hopf metric, n = 2).
    HopfVerify(Common),
    /// Integral identity at increasing quadrature resolution.
    BkmkhCheck(Common),
    /// Weighted projection bounds, projection laws and factorization.
    BergmanRun(Common),
    /// Twisted solution operator on a planar domain.
    SolveTwisted(Common),
    /// Derivative-versus-value ratios of monomials.
    Detraz(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report files; the report goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative slack on analytic bounds.
    #[arg(long)]
    slack: Option<f64>,
}

fn build_config(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let mut cfg = ExperimentConfig::new(kind);
            if kind == ExperimentKind::GeometryVerify {
                cfg.metric = Some(RegistrySpec::named("hopf").with_n(2));
            }
            cfg
        }
    };
    if cfg.kind != kind {
        return Err(Error::Schema(format!("config is a `{}` experiment, expected `{}`", cfg.kind.name(), kind.name())));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(slack) = args.slack {
        cfg.slack = Some(slack);
    }
    if let Some(out) = &args.out {
        cfg.output.dir = Some(out.clone());
    }
    if let Some(f) = args.format {
        cfg.output.formats = vec![match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &RunReport) -> Result<(), Error> {
    let formats = if report.config.output.formats.is_empty() { vec![Format::Json] } else { report.config.output.formats.clone() };
    match &report.config.output.dir {
        Some(dir) => {
            for path in report.emit(dir, &formats)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            for f in formats {
                match f {
                    Format::Json => println!("{}", report.to_json()?),
                    Format::Csv => print!("{}", report.to_csv()?),
                }
            }
        }
    }
    Ok(())
}

fn fail(e: &Error) -> ExitCode {
    let rec = ErrorRecord::from_error(e);
    println!("{}", serde_json::json!({ "error": rec }));
    ExitCode::from(rec.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::CheckDf(a) => (ExperimentKind::DfSweep, a),
        Command::HopfVerify(a) => (ExperimentKind::GeometryVerify, a),
        Command::BkmkhCheck(a) => (ExperimentKind::Bkmkh, a),
        Command::BergmanRun(a) => (ExperimentKind::Bergman, a),
        Command::SolveTwisted(a) => (ExperimentKind::Twisted, a),
        Command::Detraz(a) => (ExperimentKind::Detraz, a),
    };
    let cfg = match build_config(kind, args) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let report = match runner::run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(&report) {
        return fail(&e);
    }
    for c in report.failed_checks() {
        eprintln!("FAIL {}: {} (bound {:?}, tol {:?})", c.name, c.value, c.bound, c.tol);
    }
    if let Some(e) = &report.error {
        eprintln!("error: {}", e.message);
    }
    ExitCode::from(report.exit_code() as u8)
}
