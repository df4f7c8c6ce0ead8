//! End-to-end acceptance checks. Every criterion is evaluated, one line per
//! criterion is printed, and the test fails if any of them failed.
//!
//! ```text
//! cargo test --release --test acceptance -- --nocapture
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::Path;
use std::process::Command;

use eaf_control::config::Config;
use eaf_control::fuzzy_pid::{
    filter_lambda, pid_step, FuzzyRuleBank, PidGains, PidParams, PidState,
};
use eaf_control::ga_tuner::{evolve, ise, rule_models};
use eaf_control::harness::{run_batch, Mode};
use eaf_control::plant_sim::{analytic_step_velocity, servo_update, ServoParams};
use eaf_control::scaling::{scaled_error, scaled_variable};
use eaf_control::stage_estimator::{process_variable_p, process_variable_q, Stage};
use eaf_control::supervisor::{supervise, Measurement, Regulation, SafetyLimits, SupervisorState};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(f64::MIN_POSITIVE)
}

fn formula_fidelity() -> Outcome {
    let checks = [
        (
            "p(10000, 30)",
            process_variable_p(10000.0, 30.0).unwrap(),
            0.490277,
        ),
        (
            "q(10000, 100)",
            process_variable_q(10000.0, 100.0).unwrap(),
            0.7474,
        ),
        (
            "scaled_error(12, 6)",
            scaled_error(12.0, 6.0).unwrap(),
            -3.0,
        ),
        ("scaled_error(3, 6)", scaled_error(3.0, 6.0).unwrap(), 6.0),
        (
            "lambda(0.2, 0.1, 10)",
            filter_lambda(0.2, 0.1, 10.0),
            1.0 / 6.0,
        ),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !rel_close(*got, *want, 1e-9))
        .map(|(name, got, want)| format!("{name} = {got}, want {want}"))
        .collect();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "5 hand values within 1e-9".into()
        } else {
            bad.join("; ")
        },
    )
}

const KP: [[f64; 3]; 5] = [
    [0.3668, 0.6655, 1.140],
    [0.4879, 0.8867, 1.514],
    [0.7197, 1.321, 2.272],
    [1.517, 3.016, 7.025],
    [3.536, 6.570, 12.19],
];
const KI: [[f64; 3]; 5] = [
    [0.1067, 0.0017, 0.0036],
    [0.0081, 0.0049, 0.0043],
    [0.0020, 0.0018, 0.0044],
    [0.1030, 0.0034, 0.0115],
    [0.0186, 0.0173, 0.0070],
];
const KD: [[f64; 3]; 5] = [
    [0.0053, 0.0010, 0.0014],
    [0.0019, 0.0010, 0.0013],
    [0.0088, 0.0030, 0.0009],
    [0.0015, 0.0017, 0.0007],
    [0.0030, 0.0029, 0.0031],
];

fn rule_bank_fidelity() -> Outcome {
    let bank = FuzzyRuleBank::default();
    let mut mismatches = 0;
    for i in 0..5 {
        for j in 0..3 {
            mismatches += usize::from(bank.kp[i][j] != KP[i][j]);
            mismatches += usize::from(bank.ki[i][j] != KI[i][j]);
            mismatches += usize::from(bank.kd[i][j] != KD[i][j]);
        }
    }
    let mut worst: f64 = 0.0;
    for stage in Stage::ALL {
        for i in 0..5 {
            for j in 0..3 {
                let g = bank
                    .infer_gains(bank.p_peaks[i], bank.y_peaks.for_stage(stage)[j], stage)
                    .unwrap();
                worst = worst
                    .max((g.kp - KP[i][j]).abs())
                    .max((g.ki - KI[i][j]).abs())
                    .max((g.kd - KD[i][j]).abs());
            }
        }
    }
    outcome(
        mismatches == 0 && worst <= 1e-12,
        format!("{mismatches} of 45 entries differ; worst inference error at peaks {worst:.1e}"),
    )
}

fn anti_windup() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for _ in 0..1000 {
        let delta = rng.random_range(0.1..5.0);
        let params = PidParams {
            t_c: 0.1,
            delta,
            n: 10.0,
            u_max: 2.5,
        };
        let gains = PidGains::new(
            rng.random_range(0.0..10.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..0.1),
        );
        let mut state = PidState {
            integral_sum: rng.random_range(-50.0..50.0),
            ..PidState::default()
        };
        let held = state.integral_sum;
        for _ in 0..rng.random_range(1..50) {
            let mag = delta * rng.random_range(1.0001..20.0);
            let e = if rng.random::<bool>() { mag } else { -mag };
            state = pid_step(&state, &gains, e, &params).1;
            if state.integral_sum != held {
                failures += 1;
                break;
            }
        }
        let e = rng.random_range(-delta..=delta);
        let resumed = pid_step(&state, &gains, e, &params).1;
        if resumed.integral_sum != held + e * params.t_c {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("1000 episodes, {failures} violations"),
    )
}

fn supervisor_safety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cases = 100_000;
    let mut violations = 0;
    for _ in 0..cases {
        let i_set = rng.random_range(5_000.0..60_000.0);
        let x_react = rng.random_range(2.0..20.0);
        let limits = SafetyLimits::new(i_set, x_react);
        let z_set = rng.random_range(5.0..40.0);
        let regulation = match rng.random_range(0..3) {
            0 => Regulation::ScaledImpedance { z_set },
            1 => Regulation::Impedance { z_set },
            _ => Regulation::Current { i_set, z_set },
        };
        let now = rng.random_range(0.0..10_000.0);
        let since = |rng: &mut ChaCha8Rng| {
            rng.random::<bool>()
                .then(|| now - rng.random_range(0.0..5.0))
        };
        let state = SupervisorState {
            arc_success: rng.random(),
            overcurrent_since: since(&mut rng),
            highlift_since: since(&mut rng),
            last_command: rng.random_range(-2.5..2.5),
        };
        let pid = PidState {
            integral_sum: rng.random_range(-1e3..1e3),
            deriv_filtered: rng.random_range(-10.0..10.0),
            e_prev: rng.random_range(-50.0..50.0),
            s_accum: rng.random_range(-1e3..1e3),
            last_command: rng.random_range(-2.5..2.5),
        };
        let gains = PidGains::new(
            rng.random_range(0.0..50.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..0.1),
        );
        let params = PidParams::for_setpoint(0.1, regulation.reference());
        let i = rng.random_range(0.0..2.0 * i_set);
        let e2 = rng.random_range(0.0..800.0);
        let meas = Measurement {
            i,
            e2,
            z: if i > 0.0 {
                1000.0 * e2 / i
            } else {
                f64::INFINITY
            },
        };
        let out = supervise(
            &state, &limits, &meas, regulation, &pid, &gains, &params, now,
        );
        if i >= 1.25 * i_set && out.command < 0.0 {
            violations += 1;
        }
        let must_lift = i >= 1.5 * i_set || e2 <= 1.2 * i * x_react / 1000.0;
        if must_lift && !(out.command == 1.5 || (out.escalate_all && out.command == 2.5)) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{cases} fuzz cases, {violations} violations"),
    )
}

const SEGMENTS: usize = 20;
const SEED: u64 = 1;

fn debiasing_and_fluctuation() -> (Outcome, Outcome) {
    let cfg = Config::default();
    let (b, c) = rayon::join(
        || run_batch(&cfg, Mode::ImpedancePid, SEED, SEGMENTS).unwrap(),
        || run_batch(&cfg, Mode::FuzzyNls, SEED, SEGMENTS).unwrap(),
    );
    let bb = b.stage(Stage::MeltDown).static_error;
    let cb = c.stage(Stage::MeltDown).static_error;
    let segments = b
        .charges
        .iter()
        .filter(|m| m.melting_time().is_some())
        .count();
    let bias = outcome(
        segments >= SEGMENTS && bb > 0.0 && cb.abs() <= 0.25 * bb.abs(),
        format!(
            "{segments} melt-down segments: impedance PID {bb:+.0} A, fuzzy {cb:+.0} A, ratio {:.2} (limit 0.25)",
            cb.abs() / bb.abs()
        ),
    );
    let per_stage: Vec<String> = Stage::ALL
        .iter()
        .map(|&s| {
            format!(
                "{} {:.0} vs {:.0}",
                s.name(),
                c.stage(s).std_dev,
                b.stage(s).std_dev
            )
        })
        .collect();
    let ordered = Stage::ALL
        .iter()
        .all(|&s| c.stage(s).std_dev <= b.stage(s).std_dev);
    let spread = outcome(
        ordered,
        format!(
            "fuzzy vs impedance PID std dev (A): {}",
            per_stage.join(", ")
        ),
    );
    (bias, spread)
}

fn ga_optimality() -> Outcome {
    let cfg = Config::default();
    let t_c = cfg.furnace.t_c;
    let horizon = cfg.ga.horizon;
    let models = rule_models(&cfg.furnace, &cfg.rule_bank).unwrap();
    let bounds = cfg.ga.bounds;
    let axis = |k: usize, n: usize| bounds[k][0] + (bounds[k][1] - bounds[k][0]) * n as f64 / 19.0;
    let mut worst_gap: f64 = 0.0;
    let mut ratios = Vec::new();
    for model in &models {
        let evolved = evolve(&cfg.ga, model, t_c).unwrap().best.ise;
        let grid = (0..20 * 20 * 20)
            .into_par_iter()
            .map(|n| {
                let g = PidGains::new(axis(0, n / 400), axis(1, (n / 20) % 20), axis(2, n % 20));
                ise(model, &g, horizon, t_c)
            })
            .reduce(|| f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(evolved / grid - 1.0);
        ratios.push(evolved / ise(model, &cfg.baseline.impedance_pid, horizon, t_c));
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    outcome(
        worst_gap <= 0.05 && median <= 0.9,
        format!(
            "15 models: worst excess over grid {:+.2}%, median ISE vs fixed gains {:.2}",
            100.0 * worst_gap,
            median
        ),
    )
}

fn servo_model() -> Outcome {
    let servo = ServoParams {
        gain: 15.0,
        tau: 0.1,
    };
    let dt = 0.01;
    let (mut h, mut v) = (0.0, 0.0);
    let mut worst: f64 = 0.0;
    for step in 1..=50 {
        (h, v) = servo_update(&servo, h, v, 1.0, dt);
        if [10, 20, 50].contains(&step) {
            let want = analytic_step_velocity(&servo, 1.0, step as f64 * dt);
            let oracle = 15.0 * (1.0 - (-(step as f64) * dt / 0.1).exp());
            let t = step as f64 * dt;
            let h_oracle = 15.0 * (t - 0.1 * (1.0 - (-t / 0.1).exp()));
            worst = worst
                .max(((v - oracle) / oracle).abs())
                .max(((want - oracle) / oracle).abs())
                .max(((h - h_oracle) / h_oracle).abs());
        }
    }
    outcome(
        worst <= 0.01,
        format!("worst relative error at T, 2T, 5T: {worst:.1e}"),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_eaf"))
            .args(["compare", "--seed", "42", "--out"])
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        read_tree(&out)
    };
    let (first, second) = (run("first"), run("second"));
    let csvs = first.iter().filter(|(n, _)| n.ends_with(".csv")).count();
    outcome(
        first == second && csvs == 3,
        format!(
            "{} files ({csvs} telemetry CSVs), identical: {}",
            first.len(),
            first == second
        ),
    )
}

fn scaling_linearity() -> Outcome {
    let (e2, z_s) = (360.0, 15.0);
    let slope = z_s * z_s / e2;
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        let i = 0.3 * k as f64;
        let y = scaled_variable(e2 / i, z_s).unwrap();
        worst = worst.max(((y - slope * i) / (slope * i)).abs());
    }
    outcome(
        worst <= 1e-9,
        format!("100-point sweep, worst relative deviation {worst:.1e}"),
    )
}

#[test]
fn acceptance_suite() {
    let (bias, spread) = debiasing_and_fluctuation();
    let results = [
        ("formula fidelity", formula_fidelity()),
        ("rule-bank fidelity", rule_bank_fidelity()),
        ("anti-windup", anti_windup()),
        ("supervisor safety", supervisor_safety()),
        ("debiasing", bias),
        ("fluctuation ordering", spread),
        ("GA optimality", ga_optimality()),
        ("servo model", servo_model()),
        ("determinism", determinism()),
        ("scaling linearity", scaling_linearity()),
    ];
    for (n, (name, o)) in results.iter().enumerate() {
        println!(
            "[{}] {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            n + 1,
            o.detail
        );
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, o)| !o.pass)
        .map(|(n, _)| *n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
