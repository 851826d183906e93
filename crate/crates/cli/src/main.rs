use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vat_game::region::RegionGrid;
use vat_game::Execution;
use vat_game_cli::commands;
use vat_game_cli::config::{self, Overrides};
use vat_game_cli::{CliError, RunConfig, Table};

#[derive(Parser, Debug)]
#[command(name = "vatgame", version, about = "VAT compliance game: payoffs, thresholds and compliance regions")]
struct Cli {
    /// Built-in parameter set: appendix or section6
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Flat `key = value` file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set x_I=0`; repeatable, wins over the file
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// corrected or paper-literal
    #[arg(long, global = true)]
    mode: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Decimals in numeric output
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Write to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected payoffs per strategy
    Payoffs {
        /// no-taxes, tax or tax-with-deductions
        #[arg(long, default_value = "tax")]
        scenario: String,
        /// no-audit, certain-audit or bayesian
        #[arg(long)]
        regime: Option<String>,
        /// Audit probability; implies --regime bayesian
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        event: Option<String>,
    },
    /// Closed-form thresholds and coalition frontiers
    Thresholds {
        /// Audit probability for the Bayesian buyer row
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
    },
    /// Coalition best response over a (theta, gamma) grid; needs --out
    Region {
        #[arg(long, default_value = "0,1,0.01", value_name = "MIN,MAX,STEP")]
        theta: String,
        #[arg(long, default_value = "0,1,0.01", value_name = "MIN,MAX,STEP")]
        gamma: String,
        #[arg(long)]
        sequential: bool,
    },
    /// Recompute the worked example and diff it against the published table
    Appendix,
    /// Compare closed forms against the brute-force oracle on random draws
    Validate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long)]
        sequential: bool,
    },
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn emit(table: &Table, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let text = table.render(cfg.format, cfg.precision)?;
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        preset: cli.preset,
        config: cli.config,
        set: cli.set,
        mode: cli.mode,
        format: cli.format,
        precision: cli.precision,
    };
    // validate draws its own parameters; only format and precision matter there
    let default_preset =
        matches!(cli.command, Command::Appendix | Command::Validate { .. }).then_some("appendix");
    let cfg = config::resolve(&overrides, default_preset)?;
    let out = cli.out.as_deref();

    match cli.command {
        Command::Payoffs { scenario, regime, gamma, event } => {
            let scenario = commands::parse_scenario(&scenario)?;
            let regime = commands::parse_regime(regime.as_deref(), gamma)?;
            let event = event.as_deref().map(commands::parse_event).transpose()?;
            emit(&commands::payoffs(&cfg, scenario, regime, event)?, &cfg, out)
        }
        Command::Thresholds { gamma } => emit(&commands::thresholds(&cfg, gamma)?, &cfg, out),
        Command::Region { theta, gamma, sequential } => {
            let Some(out) = out else {
                return Err(CliError::Usage("region writes files; pass --out <path>".into()));
            };
            let grid = RegionGrid {
                theta: commands::parse_axis(&theta)?,
                gamma: commands::parse_axis(&gamma)?,
            };
            let region = commands::region(&cfg, &grid, execution(sequential))?;
            let companion = commands::frontier_path(out, cfg.format.extension());
            emit(&region.cells, &cfg, Some(out))?;
            emit(&region.frontiers, &cfg, Some(&companion))?;
            eprintln!("wrote {} cells to {}", region.cells.rows.len(), out.display());
            eprintln!("wrote frontiers to {}", companion.display());
            Ok(())
        }
        Command::Appendix => {
            let report = commands::appendix(&cfg)?;
            emit(&report.table, &cfg, out)?;
            if report.mismatches.is_empty() {
                eprintln!("appendix: all {} cells within {}", report.table.rows.len(), commands::APPENDIX_TOLERANCE);
                Ok(())
            } else {
                for m in &report.mismatches {
                    eprintln!("mismatch {m}");
                }
                Err(CliError::Mismatch(format!("{} appendix cells differ", report.mismatches.len())))
            }
        }
        Command::Validate { seed, draws, sequential } => {
            let (table, report) = commands::validate(seed, draws, execution(sequential))?;
            emit(&table, &cfg, out)?;
            eprintln!("seed {seed}, {draws} draws, {} failures", report.failure_count());
            if report.passed() {
                Ok(())
            } else {
                for f in &report.failures {
                    eprintln!("failure {f}");
                }
                Err(CliError::Mismatch(format!("{} oracle checks failed", report.failure_count())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
