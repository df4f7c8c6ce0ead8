//! Runs one charge in a chosen mode, writes its telemetry as CSV and prints
//! the per-stage current statistics.
//!
//! ```text
//! cargo run --release --example single_charge -- [mode] [seed] [out.csv]
//! ```

use std::fs::File;
use std::io::BufWriter;

use eaf_control::config::Config;
use eaf_control::harness::{run_charge, CsvSink, Mode};
use eaf_control::stage_estimator::Stage;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mode: Mode = args
        .next()
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(Mode::FuzzyNls);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);
    let path = args.next().unwrap_or_else(|| "charge.csv".into());

    let mut cfg = Config::default();
    cfg.run.telemetry_every = 10;
    let file = File::create(&path)?;
    let m = run_charge(&cfg, mode, seed, &mut CsvSink::new(BufWriter::new(file)))?;

    println!("{} ({}), seed {seed}", mode.name(), mode.description());
    for s in Stage::ALL {
        let st = m.stage(s);
        let entry = m.stage_entry[s.index()].map_or("-".into(), |t| format!("{:.1} min", t / 60.0));
        println!(
            "  {:<10} from {:>9}  static error {:>6.0} A  std {:>5.0} A",
            s.name(),
            entry,
            st.static_error,
            st.std_dev
        );
    }
    println!(
        "  {:.1} min, {:.0} kWh, {} arc losses, {:.1}% protective samples, {:?}",
        m.duration / 60.0,
        m.energy,
        m.arc_losses,
        100.0 * m.protective_samples as f64 / m.arc_on_samples.max(1) as f64,
        m.end
    );
    println!("telemetry every 1 s in {path}");
    Ok(())
}
