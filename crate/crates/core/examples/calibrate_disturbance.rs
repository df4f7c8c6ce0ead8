//! Calibrates the per-stage arc-length noise so the impedance-mode PID
//! reproduces a target current spread, then prints the three-mode table.
//!
//! Each pass runs the fixed-gain impedance loop over a batch of seeds and
//! rescales every stage's noise by `target / measured`. The current spread
//! is close to proportional to the noise, so a few passes suffice.
//!
//! ```text
//! cargo run --release --example calibrate_disturbance -- [charges] [seed] [cutoff_hz]
//! ```

use eaf_control::config::Config;
use eaf_control::harness::{compare, run_batch, Mode};
use eaf_control::stage_estimator::Stage;

/// Target standard deviation of the arc current per stage, A.
const TARGET_STD: [f64; 3] = [4500.0, 3900.0, 3400.0];
const PASSES: usize = 5;

fn main() -> eaf_control::Result<()> {
    let mut args = std::env::args().skip(1);
    let charges = args.next().and_then(|a| a.parse().ok()).unwrap_or(6);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let mut cfg = Config::default();
    if let Some(hz) = args.next().and_then(|a| a.parse().ok()) {
        cfg.furnace.disturbance.cutoff_hz = hz;
    }

    for pass in 0..PASSES {
        let report = run_batch(&cfg, Mode::ImpedancePid, seed, charges)?;
        let std = &mut cfg.furnace.disturbance.std_mm;
        print!("pass {pass}:");
        for s in Stage::ALL {
            let measured = report.stage(s).std_dev;
            print!(
                "  {} {:.1} mm -> {:.0} A",
                s.name(),
                std[s.index()],
                measured
            );
            if measured > 0.0 {
                std[s.index()] *= TARGET_STD[s.index()] / measured;
            }
        }
        println!();
    }
    let std = cfg.furnace.disturbance.std_mm;
    println!(
        "calibrated std_mm = [{:.1}, {:.1}, {:.1}]\n",
        std[0], std[1], std[2]
    );

    let comparison = compare(&cfg, seed, charges, None)?;
    print!("{}", comparison.table());
    Ok(())
}
