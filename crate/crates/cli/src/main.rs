//! Command-line front end: scenario runs, paper-figure reproduction, and
//! optimizer drivers. Exit codes: 0 success, 1 computation failure,
//! 2 configuration failure.

mod commands;
mod config;
mod output;

/// Bundled scenario documents, compiled into the binary.
pub mod scenarios {
    pub const FIG2: &str = include_str!("../scenarios/fig2.json");
    pub const FIG3_ER: &str = include_str!("../scenarios/fig3_er.json");
    pub const FIG3_ED: &str = include_str!("../scenarios/fig3_ed.json");
    pub const OPT_ED2GAUSS: &str = include_str!("../scenarios/opt_ed2gauss.json");

    pub const ALL: &[(&str, &str)] = &[
        ("fig2", FIG2),
        ("fig3_er", FIG3_ER),
        ("fig3_ed", FIG3_ED),
        ("opt_ed2gauss", OPT_ED2GAUSS),
    ];
}

use clap::{Parser, Subcommand, ValueEnum};
use config::ScenarioConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "photonshape", version, about = "Single-photon temporal shape conversion by wavepacket interference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for result files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Also write component probabilities and the joint detection density.
    #[arg(long, global = true)]
    dump_state: bool,
    /// Worker threads for sweeps and table reproduction (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Optimizer seed (overrides any seed in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario config and write result.json/shape.csv/shape.svg.
    Run { config: PathBuf },
    /// Re-create one of the published figures or the table.
    Reproduce {
        #[arg(value_enum)]
        name: ReproduceName,
    },
    /// Maximize fidelity over the free parameters declared in the config.
    Optimize { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReproduceName {
    Fig2,
    #[value(name = "fig3-er")]
    Fig3Er,
    #[value(name = "fig3-ed")]
    Fig3Ed,
    Fig4a,
    Fig4b,
    Table1,
}

/// Failure category, mapped onto the exit-code contract.
enum Failure {
    Config(anyhow::Error),
    Compute(anyhow::Error),
}

fn real_main(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(anyhow::anyhow!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::from_file(config).map_err(Failure::Config)?;
            commands::run_scenario(&cfg, &cli.out_dir, "run", cli.dump_state)
                .map_err(Failure::Compute)?;
        }
        Command::Reproduce { name } => {
            let r = match name {
                ReproduceName::Fig2 => commands::reproduce_figure("fig2", &cli.out_dir, cli.dump_state),
                ReproduceName::Fig3Er => {
                    commands::reproduce_figure("fig3_er", &cli.out_dir, cli.dump_state)
                }
                ReproduceName::Fig3Ed => {
                    commands::reproduce_figure("fig3_ed", &cli.out_dir, cli.dump_state)
                }
                ReproduceName::Fig4a => commands::reproduce_fig4a(&cli.out_dir),
                ReproduceName::Fig4b => commands::reproduce_fig4b(&cli.out_dir),
                ReproduceName::Table1 => {
                    commands::reproduce_table1(&cli.out_dir, cli.seed.unwrap_or(1))
                }
            };
            r.map_err(Failure::Compute)?;
        }
        Command::Optimize { config } => {
            let cfg = ScenarioConfig::from_file(config).map_err(Failure::Config)?;
            if cfg.optimize.is_none() {
                return Err(Failure::Config(anyhow::anyhow!(
                    "config {} has no `optimize` section",
                    config.display()
                )));
            }
            commands::cmd_optimize(&cfg, &cli.out_dir, cli.seed).map_err(Failure::Compute)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
    }
}
