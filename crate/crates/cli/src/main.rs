use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use errbar_cli::config::{check_eps, check_hbar, check_n, read_json, Defaults, ScanConfig, ScenarioConfig};
use errbar_cli::report::{write_file, write_reports};
use errbar_cli::run::{run_scan, run_verify, state_widths, widths_table};
use errbar_cli::{spec, CliError, EXIT_FAIL, EXIT_PASS};

/// Confidence widths, error bars and resolution widths of position and
/// momentum measurements.
#[derive(Debug, Parser)]
#[command(name = "errbar", version)]
struct Cli {
    /// Reduced Planck constant, unless the config sets one.
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,
    /// Directory for report files.
    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,
    /// Grid points, unless the config sets them.
    #[arg(long = "grid-n", global = true, default_value_t = 4096)]
    grid_n: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check both joint-measurement relations for every scenario row.
    Verify { config: PathBuf },
    /// Overall widths of one state, e.g. `--state gaussian:sigma=1`.
    Widths {
        #[arg(long)]
        state: String,
        /// `eps` or `eps1,eps2`.
        #[arg(long, value_delimiter = ',', num_args = 1..=2, required = true)]
        eps: Vec<f64>,
    },
    /// Width products over a one- or two-parameter lattice.
    Scan { config: PathBuf },
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let defaults = Defaults { hbar: cli.hbar, grid_n: cli.grid_n };
    match cli.command {
        Command::Verify { config } => {
            let scenario = ScenarioConfig::load(&config)?.build(&stem(&config), defaults)?;
            let rows = run_verify(&scenario)?;
            write_reports(&cli.out, &rows)?;
            let failed: Vec<_> = rows.iter().filter(|r| !r.pass).map(|r| r.scenario_id.as_str()).collect();
            println!("{} rows, {} failed; reports in {}", rows.len(), failed.len(), cli.out.display());
            for id in &failed {
                println!("FAIL {id}");
            }
            Ok(failed.is_empty())
        }
        Command::Widths { state, eps } => {
            let hbar = check_hbar(cli.hbar)?;
            let n = check_n(cli.grid_n, "--grid-n")?;
            let spec = spec::parse_state(&state)?;
            let eps = check_eps("--eps", eps[0], *eps.last().unwrap())?;
            let w = state_widths(&spec, eps, n, hbar)
                .map_err(|source| CliError::Scenario { id: spec::describe(&spec), source })?;
            print!("{}", widths_table(&spec, eps, &w));
            Ok(w.pass)
        }
        Command::Scan { config } => {
            let cfg: ScanConfig = read_json(&config)?;
            let (csv, pass) = run_scan(&cfg, defaults)?;
            let path = cli.out.join("scan.csv");
            write_file(&path, &csv)?;
            println!("{} rows written to {}", csv.lines().count().saturating_sub(2), path.display());
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::from(EXIT_PASS as u8),
        Ok(false) => ExitCode::from(EXIT_FAIL as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
