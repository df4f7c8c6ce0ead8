//! Follows the melt-progress estimator through a charge at constant power,
//! with a ten-minute power-off break during melt-down.
//!
//! ```text
//! cargo run --example stage_estimation -- [power_kw]
//! ```

use eaf_control::stage_estimator::{MeltProgress, Stage, StageCoefficients, StageEstimator};

fn main() -> eaf_control::Result<()> {
    let power: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(24_000.0);
    let est = StageEstimator::new(StageCoefficients::default())?;
    let mut prog = MeltProgress::default();
    let dt = 10.0;
    let mut t = 0.0;
    let mut last = prog.stage;

    println!(
        "{:>7}  {:>9}  {:>6}  {:>6}  {:>6}  stage",
        "t min", "W kWh", "Toff", "p", "q"
    );
    while prog.q < 1.5 && t < 4.0 * 3600.0 {
        let on = !(1200.0..1800.0).contains(&t);
        prog = est.accumulate(&prog, power, on, dt)?;
        t += dt;
        if prog.stage != last || (t % 600.0) < dt {
            println!(
                "{:>7.1}  {:>9.1}  {:>6.1}  {:>6.3}  {:>6.3}  {}{}",
                t / 60.0,
                prog.w_throw,
                prog.t_off,
                prog.p,
                prog.q,
                prog.stage.name(),
                if prog.stage != last {
                    "  <- entered"
                } else {
                    ""
                },
            );
            last = prog.stage;
        }
    }
    if let Some((w0, t0)) = prog.oxidation_origin {
        println!("\noxidation started at W = {w0:.1} kWh, T_off = {t0:.1} min");
    }
    assert_eq!(prog.stage, Stage::Reduction);
    Ok(())
}
