//! `gsqg`: run, verify and sweep entry points.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gsqg_cli::config::RunConfig;
use gsqg_cli::{runner, sweep, verify, CliError, OUTPUT_ROOT_ENV};

#[derive(Parser)]
#[command(name = "gsqg", about = "Pseudo-spectral gSQG simulator and property verifier")]
struct Cli {
    /// Output root; overrides the GSQG_OUTPUT_ROOT environment variable.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Overrides the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrates one configured run; writes series.csv, report.json and
    /// optional snapshots.
    Run { config: PathBuf },
    /// Runs the property suite on the configured grid; writes
    /// verification.json.
    Verify {
        config: PathBuf,
        /// Trials per sampled property.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// One run per (alpha, beta) grid point; writes summary.csv.
    Sweep {
        template: PathBuf,
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        /// Comma-separated absolute beta values.
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        /// Comma-separated beta offsets relative to 2*alpha + 1.
        #[arg(long, value_delimiter = ',')]
        beta_offsets: Vec<f64>,
    },
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Output directory resolution: --output-dir, else GSQG_OUTPUT_ROOT, else
/// the current directory, joined with the config's output_dir when that is
/// relative.
fn resolve_out_dir(cli_root: &Option<PathBuf>, cfg_dir: &Path) -> PathBuf {
    let root = cli_root
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if cfg_dir.is_absolute() {
        cfg_dir.to_path_buf()
    } else {
        root.join(cfg_dir)
    }
}

fn real_main() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_config(config, cli.seed)?;
            let out_dir = resolve_out_dir(&cli.output_dir, &cfg.output_dir);
            let outcome = runner::run(&cfg, &out_dir)?;
            if outcome.blew_up {
                eprintln!(
                    "blow-up detected at t = {}; partial artifacts in {}",
                    outcome.report.blow_up.unwrap().t,
                    out_dir.display()
                );
                return Ok(ExitCode::from(2));
            }
            println!("run complete: {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config, trials } => {
            let cfg = load_config(config, cli.seed)?;
            let out_dir = resolve_out_dir(&cli.output_dir, &cfg.output_dir);
            let report = verify::verify(&cfg, &out_dir, *trials)?;
            for p in &report.properties {
                println!("{}: {}", p.name, if p.pass { "pass" } else { "FAIL" });
            }
            if !report.all_pass {
                let failing: Vec<&str> = report
                    .properties
                    .iter()
                    .filter(|p| !p.pass)
                    .map(|p| p.name)
                    .collect();
                eprintln!("verification failed: {}", failing.join(", "));
                return Ok(ExitCode::from(1));
            }
            println!("verification passed: {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            template,
            alphas,
            betas,
            beta_offsets,
        } => {
            let cfg = load_config(template, cli.seed)?;
            let out_dir = resolve_out_dir(&cli.output_dir, &cfg.output_dir);
            let grid = sweep::build_grid(alphas, betas, beta_offsets);
            let path = sweep::sweep(&cfg, &grid, &out_dir, cli.threads)?;
            println!("sweep complete: {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
