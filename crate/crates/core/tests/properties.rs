use proptest::prelude::*;

use eaf_control::fuzzy_pid::{pid_step, FuzzyRuleBank, PidGains, PidParams, PidState};
use eaf_control::ga_tuner::{evolve, linearize, GaConfig};
use eaf_control::plant_sim::FurnaceConfig;
use eaf_control::scaling::{scaled_error, scaled_variable};
use eaf_control::stage_estimator::{MeltProgress, Stage, StageCoefficients, StageEstimator};
use eaf_control::supervisor::{
    supervise, Action, Measurement, Regulation, SafetyLimits, SupervisorState,
};

fn table_range(t: &[[f64; 3]; 5]) -> (f64, f64) {
    let flat = t.iter().flatten();
    (
        flat.clone().copied().fold(f64::INFINITY, f64::min),
        flat.copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

fn any_stage() -> impl Strategy<Value = Stage> {
    prop_oneof![
        Just(Stage::MeltDown),
        Just(Stage::Oxidation),
        Just(Stage::Reduction)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn stage_never_moves_backwards(
        steps in prop::collection::vec((0.0..40_000.0f64, any::<bool>(), 0.1..120.0f64), 1..300)
    ) {
        let est = StageEstimator::new(StageCoefficients::default()).unwrap();
        let mut prog = MeltProgress::default();
        for (power, on, dt) in steps {
            let next = est.accumulate(&prog, power, on, dt).unwrap();
            prop_assert!(next.stage >= prog.stage);
            prop_assert!(next.w_throw >= prog.w_throw && next.t_off >= prog.t_off);
            prop_assert!(next.p >= 0.0 && next.q >= 0.0);
            if next.stage == Stage::Reduction {
                prop_assert!(next.oxidation_origin.is_some());
            }
            prog = next;
        }
    }

    #[test]
    fn scaled_error_is_variable_minus_setpoint(z in 0.01..200.0f64, zs in 0.5..60.0f64) {
        let e = scaled_error(z, zs).unwrap();
        let y = scaled_variable(z, zs).unwrap();
        prop_assert!((e - (y - zs)).abs() <= 1e-9 * y.abs().max(zs));
    }

    #[test]
    fn scaled_error_sign_follows_impedance(z in 0.01..200.0f64, zs in 0.5..60.0f64) {
        let e = scaled_error(z, zs).unwrap();
        if z < zs {
            prop_assert!(e > 0.0);
        } else if z > zs {
            prop_assert!(e < 0.0);
        }
    }

    #[test]
    fn short_side_is_weighted_more(zs in 1.0..60.0f64, frac in 0.001..0.999f64) {
        let d = frac * zs;
        let short = scaled_error(zs - d, zs).unwrap();
        let long = scaled_error(zs + d, zs).unwrap();
        prop_assert!(short.abs() > long.abs());
    }

    #[test]
    fn inferred_gains_stay_inside_table_hull(p in 0.0..3.0f64, y in 0.0..20.0f64, stage in any_stage()) {
        let bank = FuzzyRuleBank::default();
        let g = bank.infer_gains(p, y, stage).unwrap();
        for (value, table) in [(g.kp, &bank.kp), (g.ki, &bank.ki), (g.kd, &bank.kd)] {
            let (lo, hi) = table_range(table);
            prop_assert!(value >= lo - 1e-12 && value <= hi + 1e-12);
        }
    }

    #[test]
    fn inferred_gains_are_continuous(p in 0.0..2.5f64, y in 0.0..12.0f64, stage in any_stage()) {
        // steepest premise slope is 1 / 0.3 per unit; 12.19 bounds any entry
        let bank = FuzzyRuleBank::default();
        let h = 1e-7;
        let a = bank.infer_gains(p, y, stage).unwrap();
        let b = bank.infer_gains(p + h, y + h, stage).unwrap();
        let bound = 2.0 * 12.19 * 2.0 * h / 0.3;
        prop_assert!((a.kp - b.kp).abs() <= bound);
        prop_assert!((a.ki - b.ki).abs() <= bound);
        prop_assert!((a.kd - b.kd).abs() <= bound);
    }

    #[test]
    fn integral_frozen_outside_band(
        start in -100.0..100.0f64,
        delta in 0.1..5.0f64,
        errors in prop::collection::vec((1.0001..30.0f64, any::<bool>()), 1..60),
        kp in 0.0..20.0f64, ki in 0.0..1.0f64, kd in 0.0..0.1f64,
    ) {
        let params = PidParams { t_c: 0.1, delta, n: 10.0, u_max: 2.5 };
        let gains = PidGains::new(kp, ki, kd);
        let mut s = PidState { integral_sum: start, ..PidState::default() };
        for (m, neg) in errors {
            let e = if neg { -m * delta } else { m * delta };
            let (u, next) = pid_step(&s, &gains, e, &params);
            prop_assert_eq!(next.integral_sum, start);
            prop_assert!(u.abs() <= params.u_max);
            s = next;
        }
    }

    #[test]
    fn command_is_always_saturated(
        e in -1e6..1e6f64, prev in -1e3..1e3f64,
        kp in 0.0..100.0f64, ki in 0.0..10.0f64, kd in 0.0..10.0f64,
    ) {
        let params = PidParams::for_setpoint(0.1, 15.0);
        let state = PidState { e_prev: prev, ..PidState::default() };
        let (u, _) = pid_step(&state, &PidGains::new(kp, ki, kd), e, &params);
        prop_assert!(u.abs() <= 2.5);
    }

    #[test]
    fn protective_actions_never_lower_the_electrode(
        i_frac in 0.0..2.0f64, e2 in 0.0..800.0f64,
        arc in any::<bool>(), over_age in prop::option::of(0.0..5.0f64),
        s in -500.0..500.0f64,
    ) {
        let limits = SafetyLimits::new(24_000.0, 9.0);
        let i = i_frac * 24_000.0;
        let now = 100.0;
        let state = SupervisorState {
            arc_success: arc,
            overcurrent_since: over_age.map(|a| now - a),
            ..SupervisorState::default()
        };
        let meas = Measurement { i, e2, z: if i > 0.0 { 1000.0 * e2 / i } else { f64::INFINITY } };
        let reg = Regulation::ScaledImpedance { z_set: 15.0 };
        let pid = PidState { s_accum: s, ..PidState::default() };
        let out = supervise(&state, &limits, &meas, reg, &pid, &PidGains::new(5.0, 0.1, 0.01),
            &PidParams::for_setpoint(0.1, 15.0), now);
        if out.action.is_protective() {
            prop_assert!(out.command > 0.0);
        }
        if i >= limits.over_current() {
            prop_assert!(out.action.is_protective());
        }
        if out.action == Action::Regulate || out.action == Action::Stop {
            prop_assert!(out.state.arc_success);
            prop_assert!(out.error.is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn elitism_keeps_best_so_far(seed in any::<u64>(), row in 0usize..5) {
        let cfg = FurnaceConfig::default();
        let bank = FuzzyRuleBank::default();
        let stage = FuzzyRuleBank::stage_of_set(row);
        let model = linearize(&cfg, bank.p_peaks[row], bank.y_peaks.for_stage(stage)[1], stage).unwrap();
        let ga = GaConfig { population: 16, generations: 8, seed, ..GaConfig::default() };
        let evo = evolve(&ga, &model, cfg.t_c).unwrap();
        prop_assert_eq!(evo.history.len(), ga.generations + 1);
        prop_assert!(evo.history.windows(2).all(|w| w[1] <= w[0]));
        let initial_best = evo.initial.iter().map(|i| i.ise).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(evo.history[0], initial_best);
        prop_assert_eq!(*evo.history.last().unwrap(), evo.best.ise);
    }
}
