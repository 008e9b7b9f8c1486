use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use itoprop_cli::commands::{self, read_config, Options, Report};
use itoprop_cli::{validate, CliError, ValidateOptions};

#[derive(Parser)]
#[command(
    name = "prop",
    version,
    about = "Sweeps and error tables for time-dependent Schrödinger propagators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for the randomized property checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method over the configured sweep.
    Run { config: PathBuf },
    /// Run several methods and write an error against wall-time frontier.
    Compare { config: PathBuf },
    /// Run the property checks and write validate.json.
    Validate {
        /// Perturb the Chebyshev-to-monomial table (negative control).
        #[arg(long, hide = true)]
        corrupt_c_table: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        out: cli.out,
        threads: cli.threads,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Run { config } => read_config(&config)
            .and_then(|text| commands::run(&text, &opts))
            .map(print_sweep),
        Command::Compare { config } => read_config(&config)
            .and_then(|text| commands::compare(&text, &opts))
            .map(print_sweep),
        Command::Validate { corrupt_c_table } => run_validate(&opts, corrupt_c_table),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

// failed points are reported and turn the exit code into 3
fn print_sweep(report: Report) -> u8 {
    for p in &report.points {
        let area = p.area.map(|a| format!(" area={a:.6}")).unwrap_or_default();
        match &p.result {
            Ok(d) => println!(
                "{:<6} dt={:<10}{area} eps_sol_max={:.3e} eps_norm_max={:.3e} m_k={} k_max={} N_Cheby={} wall={:.2}s",
                p.method,
                p.dt,
                d.eps_sol_max,
                d.eps_norm_max,
                d.diag.max_m_k,
                d.diag.max_k,
                d.diag.max_n_cheby,
                p.wall_seconds
            ),
            Err(e) => println!("{:<6} dt={:<10}{area} FAILED: {e}", p.method, p.dt),
        }
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    if report.failed() > 0 {
        3
    } else {
        0
    }
}

fn run_validate(opts: &Options, corrupt_c_table: bool) -> Result<u8, CliError> {
    let report = commands::with_threads(opts.threads, || {
        validate(ValidateOptions {
            seed: opts.seed,
            corrupt_c_table,
        })
    })?;
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {:<32} value={:.3e} tolerance={:.1e}  {}",
            c.name, c.value, c.tolerance, c.detail
        );
    }
    fs::create_dir_all(&opts.out)?;
    let path = opts.out.join("validate.json");
    fs::write(&path, serde_json::to_string_pretty(&report)?)?;
    println!("wrote {}", path.display());
    Ok(if report.all_passed { 0 } else { 3 })
}
