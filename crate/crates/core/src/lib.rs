//! Impedance-mode electrode position control for ultra-high-power electric
//! arc furnaces.
//!
//! The controller regulates the nonlinearly scaled impedance
//! `y = Zs^2 / Z` of every phase with a PID whose gains are scheduled by a
//! Sugeno fuzzy system over melt progress and error magnitude. A supervisory
//! ladder handles arc striking and electrode-break prevention. Around it the
//! crate provides a seeded three-phase furnace simulator, fixed-gain current
//! and impedance baselines, a genetic tuner for the rule singletons and a
//! harness that compares the three control modes stage by stage.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fuzzy_pid;
pub mod ga_tuner;
pub mod harness;
pub mod plant_sim;
pub mod scaling;
pub mod stage_estimator;
pub mod supervisor;

pub use error::{Error, Result};
