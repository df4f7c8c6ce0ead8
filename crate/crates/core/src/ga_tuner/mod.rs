//! Genetic tuning of the rule singletons.
//!
//! One local linear model per rule: the progress coordinate is the peak of
//! P_i, the error coordinate the peak of Y_j for the stage P_i belongs to.
//! Each model is tuned independently for minimum ISE of its step response.

mod evolve;
mod model;

pub use evolve::{evolve, Evolution, GaConfig, Individual};
pub use model::{ise, linearize, LocalLinearModel};

use rayon::prelude::*;

use crate::error::Result;
use crate::fuzzy_pid::{FuzzyRuleBank, P_SETS, Y_SETS};
use crate::plant_sim::FurnaceConfig;

/// The fifteen local models in rule order, row-major over `(P_i, Y_j)`.
pub fn rule_models(furnace: &FurnaceConfig, bank: &FuzzyRuleBank) -> Result<Vec<LocalLinearModel>> {
    let mut models = Vec::with_capacity(P_SETS * Y_SETS);
    for i in 0..P_SETS {
        let stage = FuzzyRuleBank::stage_of_set(i);
        for &e in bank.y_peaks.for_stage(stage) {
            models.push(linearize(furnace, bank.p_peaks[i], e, stage)?);
        }
    }
    Ok(models)
}

/// Result of tuning the full rule bank.
#[derive(Clone, Debug)]
pub struct TunedBank {
    pub bank: FuzzyRuleBank,
    pub models: Vec<LocalLinearModel>,
    pub evolutions: Vec<Evolution>,
}

/// Re-derives every singleton triple of `template`, keeping its premise
/// partitions.
pub fn tune_bank(
    furnace: &FurnaceConfig,
    template: &FuzzyRuleBank,
    ga: &GaConfig,
) -> Result<TunedBank> {
    let models = rule_models(furnace, template)?;
    let evolutions = models
        .par_iter()
        .map(|m| evolve(ga, m, furnace.t_c))
        .collect::<Result<Vec<_>>>()?;
    let mut bank = template.clone();
    for (l, evo) in evolutions.iter().enumerate() {
        let (i, j) = (l / Y_SETS, l % Y_SETS);
        let g = evo.best.gains();
        bank.kp[i][j] = g.kp;
        bank.ki[i][j] = g.ki;
        bank.kd[i][j] = g.kd;
    }
    Ok(TunedBank {
        bank,
        models,
        evolutions,
    })
}
