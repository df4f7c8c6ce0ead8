//! Melting-stage estimation from integrated active power and power-off time.
//!
//! Two empirical progress variables drive the estimate. `p` measures how far
//! the melt-down has gone and reaches 1 when the scrap is molten. `q` tracks
//! the refining period and reaches 1 when reduction starts. `q` is referenced
//! to the energy and power-off time accumulated since the oxidation stage
//! began, so the three stages follow each other in order.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{domain, Result};

/// Fitted coefficients of melt-down (`p`) and refining (`q`) progress.
pub const P_COEFF_W: f64 = 5.162e-5;
pub const P_COEFF_T: f64 = 8.641e-4;
pub const Q_COEFF_W: f64 = 9.423e-5;
pub const Q_COEFF_T: f64 = 1.949e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    MeltDown,
    Oxidation,
    Reduction,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::MeltDown, Stage::Oxidation, Stage::Reduction];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::MeltDown => "melt-down",
            Stage::Oxidation => "oxidation",
            Stage::Reduction => "reduction",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Energy and power-off weights of the two progress variables, per kWh and
/// per minute respectively.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StageCoefficients {
    pub p_coeff_w: f64,
    pub p_coeff_t: f64,
    pub q_coeff_w: f64,
    pub q_coeff_t: f64,
}

impl Default for StageCoefficients {
    fn default() -> Self {
        Self {
            p_coeff_w: P_COEFF_W,
            p_coeff_t: P_COEFF_T,
            q_coeff_w: Q_COEFF_W,
            q_coeff_t: Q_COEFF_T,
        }
    }
}

impl StageCoefficients {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.p_coeff_w,
            self.p_coeff_t,
            self.q_coeff_w,
            self.q_coeff_t,
        ];
        if all.iter().any(|c| !c.is_finite() || *c < 0.0)
            || self.p_coeff_w == 0.0
            || self.q_coeff_w == 0.0
        {
            return Err(domain(
                "stage coefficients must be finite, nonnegative, energy weights positive",
            ));
        }
        Ok(())
    }

    pub fn p(&self, w_throw: f64, t_off: f64) -> Result<f64> {
        linear_progress(self.p_coeff_w, self.p_coeff_t, w_throw, t_off)
    }

    pub fn q(&self, w_throw: f64, t_off: f64) -> Result<f64> {
        linear_progress(self.q_coeff_w, self.q_coeff_t, w_throw, t_off)
    }
}

fn linear_progress(cw: f64, ct: f64, w_throw: f64, t_off: f64) -> Result<f64> {
    if !(w_throw >= 0.0 && w_throw.is_finite()) {
        return Err(domain(format!(
            "integrated energy must be finite and >= 0, got {w_throw}"
        )));
    }
    if !(t_off >= 0.0 && t_off.is_finite()) {
        return Err(domain(format!(
            "power-off time must be finite and >= 0, got {t_off}"
        )));
    }
    Ok((cw * w_throw - ct * t_off).max(0.0))
}

/// Melt-down progress `p` for `w_throw` kWh of integrated active power and
/// `t_off` minutes of power-off time, using the default coefficients.
pub fn process_variable_p(w_throw: f64, t_off: f64) -> Result<f64> {
    StageCoefficients::default().p(w_throw, t_off)
}

/// Refining progress `q`, default coefficients.
pub fn process_variable_q(w_throw: f64, t_off: f64) -> Result<f64> {
    StageCoefficients::default().q(w_throw, t_off)
}

/// Reduction wins whenever `q >= 1`; otherwise `p` separates melt-down from
/// oxidation.
pub fn classify_stage(p: f64, q: f64) -> Stage {
    if q >= 1.0 {
        Stage::Reduction
    } else if p >= 1.0 {
        Stage::Oxidation
    } else {
        Stage::MeltDown
    }
}

/// Running melt ledger of one charge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeltProgress {
    /// Integrated active power, kWh.
    pub w_throw: f64,
    /// Accumulated power-off time, min.
    pub t_off: f64,
    pub p: f64,
    pub q: f64,
    pub stage: Stage,
    /// Ledger values at the moment melt-down ended; `q` is measured from here.
    pub oxidation_origin: Option<(f64, f64)>,
}

impl Default for MeltProgress {
    fn default() -> Self {
        Self {
            w_throw: 0.0,
            t_off: 0.0,
            p: 0.0,
            q: 0.0,
            stage: Stage::MeltDown,
            oxidation_origin: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageEstimator {
    pub coeffs: StageCoefficients,
}

impl StageEstimator {
    pub fn new(coeffs: StageCoefficients) -> Result<Self> {
        coeffs.validate()?;
        Ok(Self { coeffs })
    }

    /// Integrates one cycle of three-phase active power (kW) over `dt` seconds.
    /// Power-off cycles add to `t_off` instead. The stage never moves backwards.
    pub fn accumulate(
        &self,
        progress: &MeltProgress,
        active_power: f64,
        power_on: bool,
        dt: f64,
    ) -> Result<MeltProgress> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(domain(format!(
                "integration step must be positive, got {dt}"
            )));
        }
        if !(active_power >= 0.0 && active_power.is_finite()) {
            return Err(domain(format!(
                "active power must be finite and >= 0, got {active_power}"
            )));
        }
        let mut next = *progress;
        if power_on {
            next.w_throw += active_power * dt / 3600.0;
        } else {
            next.t_off += dt / 60.0;
        }
        self.refresh(next)
    }

    /// Recomputes `p`, `q` and the latched stage from the ledger totals.
    pub fn refresh(&self, mut progress: MeltProgress) -> Result<MeltProgress> {
        progress.p = self.coeffs.p(progress.w_throw, progress.t_off)?;
        if progress.oxidation_origin.is_none() && progress.p >= 1.0 {
            progress.oxidation_origin = Some((progress.w_throw, progress.t_off));
        }
        progress.q = match progress.oxidation_origin {
            Some((w0, t0)) => self.coeffs.q(
                (progress.w_throw - w0).max(0.0),
                (progress.t_off - t0).max(0.0),
            )?,
            None => 0.0,
        };
        progress.stage = progress.stage.max(classify_stage(progress.p, progress.q));
        Ok(progress)
    }
}
