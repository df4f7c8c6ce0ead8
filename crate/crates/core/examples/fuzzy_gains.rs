//! Prints the gain surface of the fuzzy scheduler: kp over melt progress and
//! error magnitude for each stage, plus a full fuzzy PID step.

use eaf_control::fuzzy_pid::{FuzzyPid, FuzzyRuleBank, PidParams, PidState};
use eaf_control::stage_estimator::Stage;

fn main() -> eaf_control::Result<()> {
    let bank = FuzzyRuleBank::default();
    for stage in Stage::ALL {
        let peaks = bank.y_peaks.for_stage(stage);
        println!("{} (|e| peaks {:?} mOhm), kp:", stage.name(), peaks);
        let ys: Vec<f64> = (0..=6).map(|k| k as f64 * peaks[2] / 5.0).collect();
        print!("{:>6}", "p\\|e|");
        for y in &ys {
            print!("{y:>8.2}");
        }
        println!();
        for p in [0.0, 0.2, 0.5, 0.8, 1.0, 1.2, 1.5, 1.8, 2.2] {
            print!("{p:>6.2}");
            for &y in &ys {
                print!("{:>8.3}", bank.infer_gains(p, y, stage)?.kp);
            }
            println!();
        }
        println!();
    }

    let pid = FuzzyPid::new(&bank, PidParams::for_setpoint(0.1, 15.0));
    let (u, g, _) = pid.step(&PidState::default(), 0.65, 4.0, Stage::MeltDown)?;
    println!(
        "p 0.65, e 4.0 mOhm: kp {:.3} ki {:.4} kd {:.4} -> u {u:.3} V",
        g.kp, g.ki, g.kd
    );
    Ok(())
}
