//! Fuzzy self-tuning PID.
//!
//! Every control cycle the PID gains are re-inferred from melt progress `p`
//! and the magnitude of the scaled impedance error, then one step of the
//! discrete PID law is taken.

pub mod bank;
pub mod membership;
pub mod pid;

pub use bank::{FuzzyRuleBank, GainTable, StageErrorPeaks, P_SETS, Y_SETS};
pub use pid::{filter_lambda, pid_step, PidGains, PidParams, PidState};

use crate::error::Result;
use crate::stage_estimator::Stage;

/// Free-function form of [`FuzzyRuleBank::infer_gains`].
pub fn infer_gains(bank: &FuzzyRuleBank, p: f64, y_mag: f64, stage: Stage) -> Result<PidGains> {
    bank.infer_gains(p, y_mag, stage)
}

/// Gain-scheduled controller for one phase.
#[derive(Clone, Debug)]
pub struct FuzzyPid<'a> {
    bank: &'a FuzzyRuleBank,
    params: PidParams,
}

impl<'a> FuzzyPid<'a> {
    pub fn new(bank: &'a FuzzyRuleBank, params: PidParams) -> Self {
        Self { bank, params }
    }

    pub fn params(&self) -> &PidParams {
        &self.params
    }

    /// Infers the gains for this cycle and runs the PID law on `e`.
    pub fn step(
        &self,
        state: &PidState,
        p: f64,
        e: f64,
        stage: Stage,
    ) -> Result<(f64, PidGains, PidState)> {
        let gains = self.bank.infer_gains(p, e.abs(), stage)?;
        let (u, next) = pid_step(state, &gains, e, &self.params);
        Ok((u, gains, next))
    }
}
