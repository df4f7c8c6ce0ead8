//! Run configuration in TOML.
//!
//! Every section is optional and falls back to the built-in defaults, so an
//! empty file is a valid configuration. The rule bank may be given inline as
//! `[rule_bank]` or by path through `rule_bank_file`, resolved relative to
//! the configuration file.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{config, io_err, Error, Result};
use crate::fuzzy_pid::{FuzzyRuleBank, PidGains};
use crate::ga_tuner::GaConfig;
use crate::plant_sim::FurnaceConfig;
use crate::stage_estimator::StageCoefficients;
use crate::supervisor::SafetyLimits;

/// Built-in configuration shipped with the crate.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../config/default.toml");

/// Overrides for [`SafetyLimits`]. Unset fields keep the defaults; the
/// current setpoint and reactance default to the furnace values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyOverrides {
    pub i_set: Option<f64>,
    pub i_noarc: Option<f64>,
    pub over_factor: Option<f64>,
    pub danger_factor: Option<f64>,
    pub lowvolt_factor: Option<f64>,
    pub x_react: Option<f64>,
    pub stop_e_frac: Option<f64>,
    pub stop_s: Option<f64>,
    pub v_down_fast: Option<f64>,
    pub v_up_slow: Option<f64>,
    pub v_up_fast: Option<f64>,
    pub v_all_full: Option<f64>,
    pub t_over: Option<f64>,
    pub t_escalate: Option<f64>,
}

impl SafetyOverrides {
    pub fn resolve(&self, furnace: &FurnaceConfig) -> SafetyLimits {
        let d = SafetyLimits::new(furnace.i_set, furnace.x_react);
        SafetyLimits {
            i_set: self.i_set.unwrap_or(d.i_set),
            i_noarc: self.i_noarc.unwrap_or(d.i_noarc),
            over_factor: self.over_factor.unwrap_or(d.over_factor),
            danger_factor: self.danger_factor.unwrap_or(d.danger_factor),
            lowvolt_factor: self.lowvolt_factor.unwrap_or(d.lowvolt_factor),
            x_react: self.x_react.unwrap_or(d.x_react),
            stop_e_frac: self.stop_e_frac.unwrap_or(d.stop_e_frac),
            stop_s: self.stop_s.unwrap_or(d.stop_s),
            v_down_fast: self.v_down_fast.unwrap_or(d.v_down_fast),
            v_up_slow: self.v_up_slow.unwrap_or(d.v_up_slow),
            v_up_fast: self.v_up_fast.unwrap_or(d.v_up_fast),
            v_all_full: self.v_all_full.unwrap_or(d.v_all_full),
            t_over: self.t_over.unwrap_or(d.t_over),
            t_escalate: self.t_escalate.unwrap_or(d.t_escalate),
        }
    }
}

/// Fixed gains of the two baseline controllers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineGains {
    /// Current-mode PID, gains per ampere of current error.
    pub current_pid: PidGains,
    /// Impedance-mode PID, gains per milliohm of impedance error.
    pub impedance_pid: PidGains,
}

impl Default for BaselineGains {
    fn default() -> Self {
        // A fixed loop has to stay stable at the most sensitive operating
        // point, so kp is the smallest proportional gain of the rule bank;
        // ki and kd are those of the mid melt-down rule. The current gains
        // are the same loop expressed through dZ/dI = Zs^2 / (1000 E2),
        // 225 / 360000 at the default operating point.
        Self {
            current_pid: PidGains::new(2.2925e-4, 1.125e-6, 1.875e-6),
            impedance_pid: PidGains::new(0.3668, 0.0018, 0.0030),
        }
    }
}

/// Charge-level settings of the simulator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Charge ends when refining progress `q` reaches this value.
    pub q_end: f64,
    /// Hard cap on simulated time, s.
    pub time_cap: f64,
    /// Power-off intervals as `[start, duration]` in minutes from power-on.
    pub power_off: Vec<[f64; 2]>,
    /// Write one telemetry row per phase every this many cycles.
    pub telemetry_every: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q_end: 1.5,
            time_cap: 3.0 * 3600.0,
            power_off: Vec::new(),
            telemetry_every: 1,
        }
    }
}

impl RunConfig {
    pub fn is_power_on(&self, t: f64) -> bool {
        let minutes = t / 60.0;
        !self
            .power_off
            .iter()
            .any(|[start, len]| minutes >= *start && minutes < start + len)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub furnace: FurnaceConfig,
    pub stage: StageCoefficients,
    pub safety: SafetyOverrides,
    pub rule_bank: FuzzyRuleBank,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule_bank_file: Option<PathBuf>,
    pub baseline: BaselineGains,
    pub ga: GaConfig,
    pub run: RunConfig,
}

impl Config {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Reads, resolves and validates a configuration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        if let Some(bank_path) = &cfg.rule_bank_file {
            let resolved = match path.parent() {
                Some(dir) if bank_path.is_relative() => dir.join(bank_path),
                _ => bank_path.clone(),
            };
            cfg.rule_bank = FuzzyRuleBank::load(resolved)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads `path`, or the built-in defaults when `None`.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => {
                let cfg = Self::default();
                cfg.validate()?;
                Ok(cfg)
            }
        }
    }

    pub fn safety_limits(&self) -> SafetyLimits {
        self.safety.resolve(&self.furnace)
    }

    pub fn validate(&self) -> Result<()> {
        self.furnace.validate()?;
        self.stage.validate().map_err(|e| config(e.to_string()))?;
        let limits = self.safety_limits();
        limits.validate().map_err(|e| config(e.to_string()))?;
        if (limits.i_set - self.furnace.i_set).abs() > 1e-9 * self.furnace.i_set {
            return Err(config("safety.i_set differs from furnace.i_set"));
        }
        self.rule_bank
            .validate()
            .map_err(|e| config(e.to_string()))?;
        for (name, g) in [
            ("current_pid", self.baseline.current_pid),
            ("impedance_pid", self.baseline.impedance_pid),
        ] {
            if !g.is_valid() {
                return Err(config(format!(
                    "baseline.{name} gains must be finite and >= 0"
                )));
            }
        }
        self.ga.validate()?;
        if !(self.run.q_end > 0.0 && self.run.time_cap > 0.0 && self.run.telemetry_every > 0) {
            return Err(config(
                "run.q_end, run.time_cap and run.telemetry_every must be positive",
            ));
        }
        if self
            .run
            .power_off
            .iter()
            .any(|[s, l]| !(*s >= 0.0 && *l >= 0.0))
        {
            return Err(config(
                "power-off windows must have nonnegative start and length",
            ));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_equals_defaults() {
        let cfg = Config::from_toml_str(DEFAULT_CONFIG_TOML).unwrap();
        assert_eq!(cfg, Config::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Config::from_toml_str("").unwrap(), Config::default());
    }

    #[test]
    fn partial_override() {
        let cfg =
            Config::from_toml_str("[stage]\np_coeff_w = 6e-5\n[safety]\nt_over = 2.0\n").unwrap();
        assert_eq!(cfg.stage.p_coeff_w, 6e-5);
        assert_eq!(cfg.stage.q_coeff_w, 9.423e-5);
        assert_eq!(cfg.safety_limits().t_over, 2.0);
        assert_eq!(cfg.safety_limits().i_set, cfg.furnace.i_set);
    }

    #[test]
    fn inconsistent_setpoints_fail_validation() {
        let cfg = Config::from_toml_str("[furnace]\nz_set = 14.0\n").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = Config::from_toml_str("[safety]\ni_set = 20000.0\n").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn power_off_windows() {
        let run = RunConfig {
            power_off: vec![[10.0, 5.0]],
            ..RunConfig::default()
        };
        assert!(run.is_power_on(599.0));
        assert!(!run.is_power_on(600.0));
        assert!(!run.is_power_on(899.0));
        assert!(run.is_power_on(900.0));
    }
}
