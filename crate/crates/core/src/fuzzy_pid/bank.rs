//! Rule bank of the gain-scheduling fuzzy system.
//!
//! Fifteen rules `If p is P_i and |e| is Y_j then (K_P, K_I, K_D) = ...` with
//! five sets over melt progress and three sets over the scaled error
//! magnitude. The error sets are re-anchored per melting stage.

use serde::{Deserialize, Serialize};
use std::path::Path;

use super::membership::{degrees, validate_peaks};
use super::pid::PidGains;
use crate::error::{domain, io_err, Error, Result};
use crate::stage_estimator::Stage;

pub const P_SETS: usize = 5;
pub const Y_SETS: usize = 3;

pub type GainTable = [[f64; Y_SETS]; P_SETS];

pub const DEFAULT_KP: GainTable = [
    [0.3668, 0.6655, 1.140],
    [0.4879, 0.8867, 1.514],
    [0.7197, 1.321, 2.272],
    [1.517, 3.016, 7.025],
    [3.536, 6.570, 12.19],
];

pub const DEFAULT_KI: GainTable = [
    [0.1067, 0.0017, 0.0036],
    [0.0081, 0.0049, 0.0043],
    [0.0020, 0.0018, 0.0044],
    [0.1030, 0.0034, 0.0115],
    [0.0186, 0.0173, 0.0070],
];

pub const DEFAULT_KD: GainTable = [
    [0.0053, 0.0010, 0.0014],
    [0.0019, 0.0010, 0.0013],
    [0.0088, 0.0030, 0.0009],
    [0.0015, 0.0017, 0.0007],
    [0.0030, 0.0029, 0.0031],
];

/// Anchors of P_1..P_5: three melt-down sets, then oxidation and reduction.
pub const DEFAULT_P_PEAKS: [f64; P_SETS] = [0.2, 0.5, 0.8, 1.2, 1.8];

/// Stage labels of the progress sets. Carried as metadata only.
pub const DEFAULT_BETA: [f64; P_SETS] = [12.0, 9.0, 6.0, 3.7, 1.2];

/// Error-magnitude anchors of Y_1..Y_3 for each melting stage, mOhm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageErrorPeaks {
    pub melt_down: [f64; Y_SETS],
    pub oxidation: [f64; Y_SETS],
    pub reduction: [f64; Y_SETS],
}

impl Default for StageErrorPeaks {
    fn default() -> Self {
        Self {
            melt_down: [3.0, 6.0, 9.0],
            oxidation: [2.4, 4.8, 7.2],
            reduction: [2.0, 4.0, 6.0],
        }
    }
}

impl StageErrorPeaks {
    pub fn for_stage(&self, stage: Stage) -> &[f64; Y_SETS] {
        match stage {
            Stage::MeltDown => &self.melt_down,
            Stage::Oxidation => &self.oxidation,
            Stage::Reduction => &self.reduction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzyRuleBank {
    pub p_peaks: [f64; P_SETS],
    #[serde(default = "default_beta")]
    pub beta: [f64; P_SETS],
    pub y_peaks: StageErrorPeaks,
    pub kp: GainTable,
    pub ki: GainTable,
    pub kd: GainTable,
}

fn default_beta() -> [f64; P_SETS] {
    DEFAULT_BETA
}

impl Default for FuzzyRuleBank {
    fn default() -> Self {
        Self {
            p_peaks: DEFAULT_P_PEAKS,
            beta: DEFAULT_BETA,
            y_peaks: StageErrorPeaks::default(),
            kp: DEFAULT_KP,
            ki: DEFAULT_KI,
            kd: DEFAULT_KD,
        }
    }
}

impl FuzzyRuleBank {
    pub fn validate(&self) -> Result<()> {
        validate_peaks(&self.p_peaks)?;
        if self.p_peaks[0] < 0.0 {
            return Err(domain("progress anchors must be nonnegative"));
        }
        for stage in Stage::ALL {
            let peaks = self.y_peaks.for_stage(stage);
            validate_peaks(peaks)?;
            if peaks[0] < 0.0 {
                return Err(domain(format!("{stage} error anchors must be nonnegative")));
            }
        }
        for (name, table) in [("kp", &self.kp), ("ki", &self.ki), ("kd", &self.kd)] {
            if table.iter().flatten().any(|g| !g.is_finite() || *g < 0.0) {
                return Err(domain(format!("{name} singletons must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// Singleton triple of rule (P_i, Y_j).
    pub fn singleton(&self, i: usize, j: usize) -> PidGains {
        PidGains {
            kp: self.kp[i][j],
            ki: self.ki[i][j],
            kd: self.kd[i][j],
        }
    }

    /// Stage that the progress set P_i stands for.
    pub fn stage_of_set(i: usize) -> Stage {
        match i {
            0..=2 => Stage::MeltDown,
            3 => Stage::Oxidation,
            _ => Stage::Reduction,
        }
    }

    /// Sugeno inference: rule strengths `w_l = P_i(p) * Y_j(|e|)` weight the
    /// singleton triples.
    pub fn infer_gains(&self, p: f64, y_mag: f64, stage: Stage) -> Result<PidGains> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(domain(format!(
                "progress premise must be finite and >= 0, got {p}"
            )));
        }
        if !(y_mag >= 0.0 && y_mag.is_finite()) {
            return Err(domain(format!(
                "error premise must be finite and >= 0, got {y_mag}"
            )));
        }
        let mu_p = degrees(&self.p_peaks, p);
        let mu_y = degrees(self.y_peaks.for_stage(stage), y_mag);
        let (mut sw, mut kp, mut ki, mut kd) = (0.0, 0.0, 0.0, 0.0);
        for (i, &a) in mu_p.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in mu_y.iter().enumerate() {
                let w = a * b;
                if w == 0.0 {
                    continue;
                }
                sw += w;
                kp += w * self.kp[i][j];
                ki += w * self.ki[i][j];
                kd += w * self.kd[i][j];
            }
        }
        assert!(
            sw > 0.0,
            "triangular partitions cover the whole premise space"
        );
        Ok(PidGains {
            kp: kp / sw,
            ki: ki / sw,
            kd: kd / sw,
        })
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let bank = Self::from_toml_str(&text).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        bank.validate()?;
        Ok(bank)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()?).map_err(|e| io_err(path, e))
    }
}
