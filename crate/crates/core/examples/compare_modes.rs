//! Runs the current PID, the impedance PID and the fuzzy scaled-impedance
//! loop over the same disturbance seeds and prints the stage table.
//!
//! A second table repeats the comparison with a slow (0.02 Hz) arc-length
//! disturbance, where the scheduled gains have time to act.
//!
//! ```text
//! cargo run --release --example compare_modes -- [charges] [seed]
//! ```

use eaf_control::config::Config;
use eaf_control::harness::compare;

fn main() -> eaf_control::Result<()> {
    let mut args = std::env::args().skip(1);
    let charges = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let cfg = Config::default();
    println!(
        "default disturbance ({} Hz)\n",
        cfg.furnace.disturbance.cutoff_hz
    );
    print!("{}", compare(&cfg, seed, charges, None)?.table());

    let mut slow = cfg.clone();
    slow.furnace.disturbance.cutoff_hz = 0.02;
    println!("\nslow disturbance (0.02 Hz, same noise amplitude)\n");
    print!("{}", compare(&slow, seed, charges, None)?.table());
    Ok(())
}
