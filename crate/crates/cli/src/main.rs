use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rplab::error::{EXIT_INVALID_CONFIG, EXIT_OK};
use rplab::verify::Bound;
use rplab::{parse_config_with, run, CliError, Experiment, Summary};

const DEFAULT_OUTPUT_DIR: &str = "rplab-output";

/// Electron-transfer coherence and radical-pair master-equation experiments.
///
/// Output directory precedence: --output-dir, then the config's output_dir,
/// then $RPLAB_OUTPUT_DIR, then ./rplab-output.
///
/// Exit codes: 0 success, 1 invalid config, 2 failed verification
/// property, 3 runtime or I/O error.
#[derive(Parser, Debug)]
#[command(name = "rplab", version)]
struct Cli {
    /// JSON run configuration.
    config: PathBuf,

    #[arg(long)]
    output_dir: Option<PathBuf>,

    /// Override the config's experiment.
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,

    /// Only report errors.
    #[arg(short, long)]
    quiet: bool,
}

fn report(summary: &Summary) {
    match summary {
        Summary::Et(s) => {
            let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6}"));
            println!(
                "golden-rule k = {}, Gamma = {}, fitted k = {}",
                show(s.k_golden),
                show(s.gamma_golden),
                show(s.k_fit)
            );
        }
        Summary::Rp(variants) => {
            for v in variants {
                println!(
                    "{}: Y_S = {:.6}, survival = {:.6}, max entropy = {:.6}",
                    v.label, v.singlet_yield, v.survival, v.max_entropy
                );
            }
        }
        Summary::Verify(r) => {
            let passed = r.properties.iter().filter(|p| p.passed()).count();
            println!("{passed}/{} properties passed", r.properties.len());
        }
        Summary::Sweep(n) => println!("{n} sweep points"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(CliError::io(&cli.config))?;
    let cfg = parse_config_with(&text, cli.experiment)?;
    let out_dir = cli
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("RPLAB_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

    let outcome = run(&cfg, &out_dir)?;
    if let Summary::Verify(r) = &outcome.summary {
        for p in r.properties.iter().filter(|p| !p.passed()) {
            let measured = p.measured.map_or("none".to_string(), |v| format!("{v:e}"));
            let op = if p.bound == Bound::AtMost { "<=" } else { ">=" };
            eprintln!(
                "FAIL {} ({}): measured {measured}, required {op} {:e}; {}",
                p.name, p.module, p.threshold, p.detail
            );
        }
    }
    if !cli.quiet {
        report(&outcome.summary);
        println!("wrote {} files under {}", outcome.files.len(), out_dir.display());
    }
    Ok(outcome.exit_code())
}
