//! Stochastic arc-length disturbance.
//!
//! Each phase carries a first-order filtered Gaussian length noise whose
//! stationary standard deviation depends on the melting stage, plus
//! Poisson-timed scrap cave-ins during melt-down that shift the burden level
//! under the electrode.
//!
//! Random numbers come from a ChaCha stream per phase that is repositioned to
//! a fixed word offset every cycle. The draws of cycle `k` therefore depend
//! only on `(seed, phase, k)`, whatever the controller did before.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::stage_estimator::Stage;

/// 32-bit words reserved per cycle.
const WORDS_PER_CYCLE: u128 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DisturbanceProfile {
    /// Stationary std-dev of the arc-length noise per stage, mm.
    pub std_mm: [f64; 3],
    /// Corner frequency of the noise filter, Hz.
    pub cutoff_hz: f64,
    /// Mean rate of cave-ins during melt-down, 1/s.
    pub cave_in_rate: f64,
    /// Cave-in step range, mm.
    pub cave_in_mm: [f64; 2],
}

impl Default for DisturbanceProfile {
    fn default() -> Self {
        Self {
            std_mm: [29.7, 29.1, 27.0],
            cutoff_hz: 1.0,
            cave_in_rate: 1.0 / 30.0,
            cave_in_mm: [10.0, 30.0],
        }
    }
}

impl DisturbanceProfile {
    pub fn quiet() -> Self {
        Self {
            std_mm: [0.0; 3],
            cave_in_rate: 0.0,
            ..Self::default()
        }
    }

    pub fn std_for(&self, stage: Stage) -> f64 {
        self.std_mm[stage.index()]
    }
}

/// Random draws consumed by one phase in one cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleDraws {
    pub normal: f64,
    pub event: f64,
    pub magnitude: f64,
    pub sign: f64,
}

#[derive(Clone, Debug)]
pub struct DisturbanceStream {
    rng: ChaCha8Rng,
}

impl DisturbanceStream {
    pub fn new(seed: u64, phase: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(phase as u64);
        Self { rng }
    }

    pub fn draws(&mut self, cycle: u64) -> CycleDraws {
        self.rng.set_word_pos(cycle as u128 * WORDS_PER_CYCLE);
        let normal: f64 = self.rng.sample(StandardNormal);
        let event: f64 = self.rng.random();
        let magnitude: f64 = self.rng.random();
        let sign = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
        CycleDraws {
            normal,
            event,
            magnitude,
            sign,
        }
    }
}

/// Filtered noise and burden level of one phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceState {
    /// Current length noise, mm.
    pub noise: f64,
}

/// Advances the noise filter and the burden level by one step.
/// Returns `(noise, bath_level)`.
pub fn advance(
    profile: &DisturbanceProfile,
    draws: &CycleDraws,
    noise: f64,
    bath_level: f64,
    stage: Stage,
    dt: f64,
) -> (f64, f64) {
    let a = (-2.0 * std::f64::consts::PI * profile.cutoff_hz * dt).exp();
    let sigma = profile.std_for(stage);
    let noise = a * noise + sigma * (1.0 - a * a).sqrt() * draws.normal;
    let mut bath = bath_level;
    if stage == Stage::MeltDown && draws.event < profile.cave_in_rate * dt {
        let [lo, hi] = profile.cave_in_mm;
        bath += draws.sign * (lo + (hi - lo) * draws.magnitude);
    }
    (noise, bath)
}
