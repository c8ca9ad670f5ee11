use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use liouville_cli::{
    cmd_classical_action, cmd_decay_scan, cmd_holography, cmd_tz, parse_ladder_flag, parse_scenario, render_ndjson,
    render_table, CliError, Overrides, ScanKind,
};

#[derive(Parser)]
#[command(name = "liouville", version, about = "Cross-check closed forms against quadrature for orbifold quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Override the identity tolerance of the scenario.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Override the truncation ladder exponents, as k_min:k_max.
    #[arg(long, global = true, value_parser = parse_ladder_flag)]
    ladder: Option<(u32, u32)>,

    /// Override the seed of randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Ndjson)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic, D values, elliptic line integrals and S.
    ClassicalAction,
    /// Axis integrals and the Fuchsian holography identity.
    Holography,
    /// Truncation scan: cusp_w2, elliptic_w2 or cusp_w1.
    DecayScan {
        #[arg(value_parser = |s: &str| s.parse::<ScanKind>())]
        which: ScanKind,
    },
    /// TZ potential against the renormalized axis length.
    Tz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Records on stdout, summary table on stderr.
    Ndjson,
    /// Summary table on stdout.
    Table,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Invalid("--scenario <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let overrides = Overrides {
        identity_tol: cli.tol,
        ladder: cli.ladder,
        seed: cli.seed,
    };
    let sc = parse_scenario(&text, overrides)?;
    let records = match &cli.command {
        Command::ClassicalAction => cmd_classical_action(&sc),
        Command::Holography => cmd_holography(&sc),
        Command::DecayScan { which } => cmd_decay_scan(&sc, *which)?,
        Command::Tz => cmd_tz(&sc),
    };
    match cli.format {
        Format::Ndjson => {
            print!("{}", render_ndjson(&records));
            eprint!("{}", render_table(&records));
        }
        Format::Table => print!("{}", render_table(&records)),
    }
    Ok(records.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
