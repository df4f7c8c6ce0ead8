//! Tunes one rule's PID gains on its local linear model and compares the
//! result with the shipped singleton and with a coarse grid search.
//!
//! ```text
//! cargo run --release --example ga_tuning -- [row 0..4] [col 0..2]
//! ```

use eaf_control::config::Config;
use eaf_control::fuzzy_pid::{FuzzyRuleBank, PidGains};
use eaf_control::ga_tuner::{evolve, ise, linearize};

fn main() -> eaf_control::Result<()> {
    let mut args = std::env::args().skip(1);
    let row: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2).min(4);
    let col: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1).min(2);

    let cfg = Config::default();
    let bank = &cfg.rule_bank;
    let stage = FuzzyRuleBank::stage_of_set(row);
    let e = bank.y_peaks.for_stage(stage)[col];
    let model = linearize(&cfg.furnace, bank.p_peaks[row], e, stage)?;
    println!(
        "P{} Y{}: p {:.2}, e {:.1} mOhm, arc {:.0} mm, loop gain {:.3} 1/(V s)",
        row + 1,
        col + 1,
        model.p_point,
        e,
        model.arc_length,
        model.loop_gain
    );

    let t_c = cfg.furnace.t_c;
    let horizon = cfg.ga.horizon;
    let evo = evolve(&cfg.ga, &model, t_c)?;
    for (g, best) in evo.history.iter().enumerate().step_by(10) {
        println!("  generation {g:>3}: best ISE {best:.4}");
    }
    let tuned = evo.best.gains();
    let shipped = bank.singleton(row, col);
    println!(
        "tuned    kp {:.3} ki {:.5} kd {:.5}  ISE {:.4}",
        tuned.kp, tuned.ki, tuned.kd, evo.best.ise
    );
    println!(
        "shipped  kp {:.3} ki {:.5} kd {:.5}  ISE {:.4}",
        shipped.kp,
        shipped.ki,
        shipped.kd,
        ise(&model, &shipped, horizon, t_c)
    );

    let n = 12;
    let b = cfg.ga.bounds;
    let at = |k: usize, r: [f64; 2]| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64;
    let mut grid = f64::INFINITY;
    for a in 0..n {
        for c in 0..n {
            for d in 0..n {
                let g = PidGains::new(at(a, b[0]), at(c, b[1]), at(d, b[2]));
                grid = grid.min(ise(&model, &g, horizon, t_c));
            }
        }
    }
    println!("grid {n}^3 best ISE {grid:.4}");
    Ok(())
}
