//! Walks one phase through the supervisory ladder: bore-down, arc strike,
//! regulation, the stop band, sustained over-current and escalation.

use eaf_control::fuzzy_pid::{PidGains, PidParams, PidState};
use eaf_control::supervisor::{supervise, Measurement, Regulation, SafetyLimits, SupervisorState};

fn sample(i: f64) -> Measurement {
    let e2 = 360.0;
    Measurement {
        i,
        e2,
        z: if i > 0.0 {
            1000.0 * e2 / i
        } else {
            f64::INFINITY
        },
    }
}

fn main() {
    let limits = SafetyLimits::new(24_000.0, 9.0);
    let reg = Regulation::ScaledImpedance { z_set: 15.0 };
    let params = PidParams::for_setpoint(0.1, 15.0);
    let gains = PidGains::new(0.7, 0.002, 0.003);

    // (label, current, cycles)
    let script = [
        ("no arc", 0.0, 3),
        ("arc struck, long", 19_000.0, 3),
        ("at setpoint", 24_000.0, 3),
        ("over-current", 31_000.0, 12),
        ("danger current", 37_000.0, 25),
        ("recovered", 24_500.0, 3),
    ];
    let mut sup = SupervisorState::default();
    let mut pid = PidState::default();
    let mut t = 0.0;
    println!(
        "{:>6}  {:<18} {:>8}  {:<10} {:>7}  escalate",
        "t s", "situation", "I A", "action", "u V"
    );
    for (label, i, cycles) in script {
        for _ in 0..cycles {
            let out = supervise(&sup, &limits, &sample(i), reg, &pid, &gains, &params, t);
            println!(
                "{t:>6.1}  {label:<18} {i:>8.0}  {:<10} {:>7.3}  {}",
                out.action.name(),
                out.command,
                if out.escalate_all { "all phases" } else { "" }
            );
            sup = out.state;
            pid = out.pid;
            t += 0.1;
        }
    }
}
