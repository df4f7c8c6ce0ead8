//! Deterministic three-phase furnace plant.
//!
//! Per phase: servo-driven electrode, RMS arc circuit and a stage-dependent
//! arc-length disturbance. All phases advance synchronously at the control
//! cycle.

pub mod circuit;
pub mod disturbance;
pub mod servo;

pub use circuit::{circuit_solve, ArcCircuit, CircuitPoint};
pub use disturbance::{DisturbanceProfile, DisturbanceState, DisturbanceStream};
pub use servo::{analytic_step_velocity, servo_update, ServoParams};

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::stage_estimator::Stage;

pub const PHASES: usize = 3;

/// Static plant, transformer and loop constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FurnaceConfig {
    /// Servo velocity gain K, (mm/s)/V.
    pub servo_gain: f64,
    /// Servo time constant T, s.
    pub servo_tau: f64,
    /// Secondary phase voltage of the selected tap, V.
    pub e2_nominal: f64,
    /// Secondary voltage range across the transformer taps, V.
    pub e2_range: [f64; 2],
    /// Allowable current, A.
    pub i_rated: f64,
    /// Transformer rating, MVA.
    pub transformer_mva: f64,
    /// Short-network reactance per phase, mOhm.
    pub x_react: f64,
    /// Short-network resistance per phase, mOhm.
    pub r_short: f64,
    /// Arc voltage at zero length, V.
    pub arc_v_offset: f64,
    /// Arc voltage gradient at the start of the charge, V/mm.
    pub arc_v_per_mm: f64,
    /// Gradient multiplier over melt progress as `[p, factor]` anchors,
    /// linearly interpolated and held beyond the ends.
    pub arc_gradient_profile: Vec<[f64; 2]>,
    /// Arc current setpoint, A.
    pub i_set: f64,
    /// Impedance setpoint, mOhm.
    pub z_set: f64,
    /// Control cycle, s.
    pub t_c: f64,
    /// Electrode height above the burden at power-on, mm.
    pub h_initial: f64,
    pub disturbance: DisturbanceProfile,
}

impl Default for FurnaceConfig {
    fn default() -> Self {
        Self {
            servo_gain: 15.0,
            servo_tau: 0.1,
            e2_nominal: 360.0,
            e2_range: [180.0, 540.0],
            i_rated: 30_000.0,
            transformer_mva: 26.0,
            x_react: 9.0,
            r_short: 0.6,
            arc_v_offset: 40.0,
            arc_v_per_mm: 1.2,
            arc_gradient_profile: vec![[0.2, 1.0], [1.8, 0.75]],
            i_set: 24_000.0,
            z_set: 15.0,
            t_c: 0.1,
            h_initial: 350.0,
            disturbance: DisturbanceProfile::default(),
        }
    }
}

impl FurnaceConfig {
    pub fn servo(&self) -> ServoParams {
        ServoParams {
            gain: self.servo_gain,
            tau: self.servo_tau,
        }
    }

    /// Gradient multiplier at melt progress `p`.
    pub fn gradient_factor(&self, p: f64) -> f64 {
        let pts = &self.arc_gradient_profile;
        match pts.len() {
            0 => 1.0,
            _ if p <= pts[0][0] => pts[0][1],
            n if p >= pts[n - 1][0] => pts[n - 1][1],
            _ => {
                let k = pts.partition_point(|pt| pt[0] <= p) - 1;
                let [p0, f0] = pts[k];
                let [p1, f1] = pts[k + 1];
                f0 + (f1 - f0) * (p - p0) / (p1 - p0)
            }
        }
    }

    /// Arc circuit at melt progress `p` with the nominal tap voltage.
    pub fn circuit_at(&self, p: f64) -> ArcCircuit {
        ArcCircuit {
            e2: self.e2_nominal,
            r_short: self.r_short,
            x_react: self.x_react,
            arc_v_offset: self.arc_v_offset,
            arc_v_per_mm: self.arc_v_per_mm * self.gradient_factor(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("servo_gain", self.servo_gain),
            ("servo_tau", self.servo_tau),
            ("e2_nominal", self.e2_nominal),
            ("i_rated", self.i_rated),
            ("x_react", self.x_react),
            ("arc_v_per_mm", self.arc_v_per_mm),
            ("i_set", self.i_set),
            ("z_set", self.z_set),
            ("t_c", self.t_c),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config(format!("furnace.{name} must be positive, got {v}")));
            }
        }
        if !(self.r_short >= 0.0 && self.arc_v_offset >= 0.0) {
            return Err(config(
                "furnace resistance and arc offset must be nonnegative",
            ));
        }
        let [lo, hi] = self.e2_range;
        if !(lo <= self.e2_nominal && self.e2_nominal <= hi) {
            return Err(config(format!(
                "secondary voltage {} V outside the tap range {lo}..{hi} V",
                self.e2_nominal
            )));
        }
        let z_expected = 1000.0 * self.e2_nominal / self.i_set;
        if (self.z_set - z_expected).abs() > 1e-6 * z_expected {
            return Err(config(format!(
                "impedance setpoint {} mOhm inconsistent with e2/i_set = {z_expected} mOhm",
                self.z_set
            )));
        }
        if self.i_set > self.i_rated {
            return Err(config("current setpoint above the allowable current"));
        }
        if self
            .arc_gradient_profile
            .windows(2)
            .any(|w| w[1][0] <= w[0][0])
            || self.arc_gradient_profile.iter().any(|pt| !(pt[1] > 0.0))
        {
            return Err(config(
                "arc gradient profile needs increasing p and positive factors",
            ));
        }
        for p in self
            .arc_gradient_profile
            .iter()
            .map(|pt| pt[0])
            .chain([0.0])
        {
            if self
                .circuit_at(p)
                .arc_length_for_current(self.i_set)
                .is_none()
            {
                return Err(config(format!("current setpoint unreachable at p = {p}")));
            }
        }
        let d = &self.disturbance;
        if d.std_mm.iter().any(|s| !(*s >= 0.0)) || !(d.cutoff_hz > 0.0) || !(d.cave_in_rate >= 0.0)
        {
            return Err(config(
                "disturbance profile must be nonnegative with a positive cutoff",
            ));
        }
        if !(0.0 <= d.cave_in_mm[0] && d.cave_in_mm[0] <= d.cave_in_mm[1]) {
            return Err(config("cave-in range must be ordered and nonnegative"));
        }
        Ok(())
    }
}

/// Mechanical and disturbance state of one phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    /// Electrode tip height, mm.
    pub h: f64,
    /// Electrode velocity, mm/s.
    pub v: f64,
    /// Effective arc length, mm.
    pub l_arc: f64,
    /// Burden level under the electrode, mm.
    pub bath_level: f64,
    pub disturbance: DisturbanceState,
}

impl PhaseState {
    pub fn at_height(h: f64) -> Self {
        Self {
            h,
            l_arc: h.max(0.0),
            ..Default::default()
        }
    }

    fn refresh_arc(&mut self) {
        self.l_arc = (self.h - self.bath_level + self.disturbance.noise).max(0.0);
    }
}

/// Moves the electrode for one step of command `u`.
pub fn servo_step(state: &PhaseState, servo: &ServoParams, u: f64, dt: f64) -> PhaseState {
    let mut next = *state;
    (next.h, next.v) = servo_update(servo, state.h, state.v, u, dt);
    next.refresh_arc();
    next
}

/// Applies one cycle of stage-dependent disturbance.
pub fn disturb(
    state: &PhaseState,
    stage: Stage,
    profile: &DisturbanceProfile,
    stream: &mut DisturbanceStream,
    cycle: u64,
    dt: f64,
) -> PhaseState {
    let mut next = *state;
    let draws = stream.draws(cycle);
    (next.disturbance.noise, next.bath_level) = disturbance::advance(
        profile,
        &draws,
        state.disturbance.noise,
        state.bath_level,
        stage,
        dt,
    );
    next.refresh_arc();
    next
}

/// Three-phase furnace.
#[derive(Clone, Debug)]
pub struct Furnace {
    cfg: FurnaceConfig,
    phases: [PhaseState; PHASES],
    streams: [DisturbanceStream; PHASES],
    cycle: u64,
}

impl Furnace {
    pub fn new(cfg: FurnaceConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let phase = PhaseState::at_height(cfg.h_initial);
        Ok(Self {
            phases: [phase; PHASES],
            streams: std::array::from_fn(|k| DisturbanceStream::new(seed, k)),
            cycle: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &FurnaceConfig {
        &self.cfg
    }

    pub fn phases(&self) -> &[PhaseState; PHASES] {
        &self.phases
    }

    pub fn phases_mut(&mut self) -> &mut [PhaseState; PHASES] {
        &mut self.phases
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// RMS readings of every phase. With the power off there is no voltage.
    pub fn measure(&self, p: f64, power_on: bool) -> [CircuitPoint; PHASES] {
        if !power_on {
            return [CircuitPoint::arc_out(0.0); PHASES];
        }
        let circuit = self.cfg.circuit_at(p);
        std::array::from_fn(|k| circuit.solve(self.phases[k].l_arc))
    }

    /// Actuates all phases, then advances the disturbances by one cycle.
    pub fn advance(&mut self, commands: [f64; PHASES], stage: Stage) {
        let servo = self.cfg.servo();
        let dt = self.cfg.t_c;
        for (k, u) in commands.into_iter().enumerate() {
            let moved = servo_step(&self.phases[k], &servo, u, dt);
            self.phases[k] = disturb(
                &moved,
                stage,
                &self.cfg.disturbance,
                &mut self.streams[k],
                self.cycle,
                dt,
            );
        }
        self.cycle += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_consistent() {
        FurnaceConfig::default().validate().unwrap();
    }

    #[test]
    fn inconsistent_setpoint_is_refused() {
        let cfg = FurnaceConfig {
            z_set: 16.0,
            ..FurnaceConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(Furnace::new(cfg, 0).is_err());
    }

    #[test]
    fn secondary_voltage_must_be_in_tap_range() {
        let cfg = FurnaceConfig {
            e2_nominal: 600.0,
            z_set: 25.0,
            ..FurnaceConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn gradient_profile_interpolates() {
        let cfg = FurnaceConfig::default();
        assert_eq!(cfg.gradient_factor(0.0), 1.0);
        assert!((cfg.gradient_factor(1.0) - (1.0 + (0.75 - 1.0) * 0.5)).abs() < 1e-12);
        assert_eq!(cfg.gradient_factor(3.0), 0.75);
    }

    #[test]
    fn quiet_plant_holds_still() {
        let cfg = FurnaceConfig {
            disturbance: DisturbanceProfile::quiet(),
            h_initial: 180.0,
            ..FurnaceConfig::default()
        };
        let mut f = Furnace::new(cfg, 1).unwrap();
        let first = f.measure(0.1, true);
        for _ in 0..100 {
            f.advance([0.0; 3], Stage::MeltDown);
        }
        assert_eq!(f.measure(0.1, true), first);
        assert!(first[0].i > 0.0);
    }

    #[test]
    fn power_off_reads_nothing() {
        let f = Furnace::new(FurnaceConfig::default(), 1).unwrap();
        let m = f.measure(0.3, false);
        assert!(m.iter().all(|pt| pt.i == 0.0 && pt.p_active == 0.0));
    }

    #[test]
    fn disturbance_seeds_are_reproducible() {
        let run = |seed| {
            let mut f = Furnace::new(FurnaceConfig::default(), seed).unwrap();
            for _ in 0..500 {
                f.advance([0.0; 3], Stage::MeltDown);
            }
            *f.phases()
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }
}
