use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use eaf_control::config::Config;
use eaf_control::ga_tuner::tune_bank;
use eaf_control::harness::{self, Mode};
use eaf_control::plant_sim::FurnaceConfig;

#[derive(Parser)]
#[command(
    name = "eaf",
    version,
    about = "Electrode control simulator for arc furnaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run charges in one control mode and write telemetry plus report.json.
    Simulate {
        #[arg(long)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        charges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all three modes over the same seeds and print the stage table.
    Compare {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        charges: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tune the rule singletons and write the bank as TOML.
    Tune {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> eaf_control::Result<()> {
    match cli.command {
        Command::Simulate {
            mode,
            charges,
            seed,
            config,
            out,
        } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            let report = harness::simulate(&cfg, mode, seed, charges, &out)?;
            for s in eaf_control::stage_estimator::Stage::ALL {
                let m = report.stage(s);
                println!(
                    "{:<12} static error {:>8.0} A   std dev {:>7.0} A   ({} samples)",
                    s.name(),
                    m.static_error,
                    m.std_dev,
                    m.samples
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Compare {
            seed,
            charges,
            config,
            out,
        } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            let comparison = harness::compare(&cfg, seed, charges, Some(&out))?;
            print!("{}", comparison.table());
            println!("wrote {}", out.display());
        }
        Command::Tune { config, out } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            let furnace: &FurnaceConfig = &cfg.furnace;
            let tuned = tune_bank(furnace, &cfg.rule_bank, &cfg.ga)?;
            for (l, (model, evo)) in tuned.models.iter().zip(&tuned.evolutions).enumerate() {
                let g = evo.best.gains();
                println!(
                    "P{} Y{}  p={:.2} e={:.1}  kp {:>7.3}  ki {:>8.5}  kd {:>8.5}  ise {:.3}",
                    l / 3 + 1,
                    l % 3 + 1,
                    model.p_point,
                    model.e_point,
                    g.kp,
                    g.ki,
                    g.kd,
                    evo.best.ise
                );
            }
            tuned.bank.save(&out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eaf: {e}");
            ExitCode::FAILURE
        }
    }
}
