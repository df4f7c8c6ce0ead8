//! Closed-loop charges on the simulated furnace.
//!
//! Three control modes share the plant, the supervisor and the disturbance
//! streams, so a given seed puts every mode through the same melt:
//!
//! * `current-pid`: fixed-gain PID on `Is - I`,
//! * `impedance-pid`: fixed-gain PID on `Zs - Z`,
//! * `fuzzy-nls`: fuzzy-scheduled PID on the scaled error `(Zs / Z)(Zs - Z)`.
//!
//! Stage statistics pool every phase-cycle where the arc is established and
//! the power is on.

mod metrics;
mod telemetry;

pub use metrics::{ChargeMetrics, Comparison, EndReason, MetricsReport, Moments, StageMetrics};
pub use telemetry::{CsvSink, NullSink, TelemetryRow, TelemetrySink, VecSink};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::config::Config;
use crate::error::{config, io_err, Result};
use crate::fuzzy_pid::{pid_step, PidGains, PidParams, PidState};
use crate::plant_sim::{Furnace, PHASES};
use crate::stage_estimator::{MeltProgress, StageEstimator};
use crate::supervisor::{supervise, Action, Measurement, Regulation, SupervisorState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    CurrentPid,
    ImpedancePid,
    FuzzyNls,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::CurrentPid, Mode::ImpedancePid, Mode::FuzzyNls];

    pub fn name(self) -> &'static str {
        match self {
            Mode::CurrentPid => "current-pid",
            Mode::ImpedancePid => "impedance-pid",
            Mode::FuzzyNls => "fuzzy-nls",
        }
    }

    /// Column label in the comparison table.
    pub fn letter(self) -> char {
        match self {
            Mode::CurrentPid => 'A',
            Mode::ImpedancePid => 'B',
            Mode::FuzzyNls => 'C',
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Mode::CurrentPid => "current-mode PID",
            Mode::ImpedancePid => "impedance-mode PID",
            Mode::FuzzyNls => "fuzzy nonlinear-scaled impedance control",
        }
    }

    pub fn regulation(self, z_set: f64, i_set: f64) -> Regulation {
        match self {
            Mode::CurrentPid => Regulation::Current { i_set, z_set },
            Mode::ImpedancePid => Regulation::Impedance { z_set },
            Mode::FuzzyNls => Regulation::ScaledImpedance { z_set },
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown mode `{s}` (expected current-pid, impedance-pid or fuzzy-nls)")
            })
    }
}

/// Output of a fixed-gain baseline for one regulation error: the PID acts
/// on `e` and the command is folded by the sign convention of the
/// regulated quantity.
pub fn baseline_command(
    regulation: Regulation,
    gains: &PidGains,
    state: &PidState,
    e: f64,
    params: &PidParams,
) -> (f64, PidState) {
    let (u, next) = pid_step(state, gains, e, params);
    (regulation.polarity() * u, next)
}

/// Runs one charge from power-on until refining is complete or the time cap
/// is hit.
pub fn run_charge(
    cfg: &Config,
    mode: Mode,
    seed: u64,
    sink: &mut dyn TelemetrySink,
) -> Result<ChargeMetrics> {
    cfg.validate()?;
    let limits = cfg.safety_limits();
    let estimator = StageEstimator::new(cfg.stage)?;
    let mut furnace = Furnace::new(cfg.furnace.clone(), seed)?;
    let t_c = cfg.furnace.t_c;
    let regulation = mode.regulation(cfg.furnace.z_set, cfg.furnace.i_set);
    let params = PidParams::for_setpoint(t_c, regulation.reference());

    let mut sup = [SupervisorState::default(); PHASES];
    let mut pid = [PidState::default(); PHASES];
    let mut progress = MeltProgress::default();
    let mut metrics = ChargeMetrics {
        mode,
        seed,
        deviation: Default::default(),
        duration: 0.0,
        energy: 0.0,
        stage_entry: [Some(0.0), None, None],
        end: EndReason::TimeCap,
        arc_on_samples: 0,
        protective_samples: 0,
        arc_losses: 0,
    };

    let cycles = (cfg.run.time_cap / t_c).ceil() as u64;
    for k in 0..cycles {
        let t = k as f64 * t_c;
        let power_on = cfg.run.is_power_on(t);
        let stage = progress.stage;
        let readings = furnace.measure(progress.p, power_on);

        let mut commands = [0.0; PHASES];
        let mut actions = [Action::PowerOff; PHASES];
        let mut errors = [f64::NAN; PHASES];
        let mut used = [PidGains::ZERO; PHASES];
        let mut escalate = false;
        for ph in 0..PHASES {
            if !power_on {
                sup[ph] = SupervisorState::default();
                pid[ph] = PidState::default();
                continue;
            }
            let meas = Measurement {
                i: readings[ph].i,
                e2: readings[ph].e2,
                z: readings[ph].z,
            };
            let gains = match mode {
                Mode::CurrentPid => cfg.baseline.current_pid,
                Mode::ImpedancePid => cfg.baseline.impedance_pid,
                Mode::FuzzyNls if meas.i >= limits.i_noarc => {
                    let e = regulation.error(&meas);
                    cfg.rule_bank.infer_gains(progress.p, e.abs(), stage)?
                }
                Mode::FuzzyNls => PidGains::ZERO,
            };
            let was_on = sup[ph].arc_success;
            let out = supervise(
                &sup[ph], &limits, &meas, regulation, &pid[ph], &gains, &params, t,
            );
            if was_on && !out.state.arc_success {
                metrics.arc_losses += 1;
            }
            sup[ph] = out.state;
            pid[ph] = out.pid;
            commands[ph] = out.command;
            actions[ph] = out.action;
            errors[ph] = out.error.unwrap_or(f64::NAN);
            used[ph] = gains;
            escalate |= out.escalate_all;
        }
        if escalate {
            commands = [limits.v_all_full; PHASES];
            actions = [Action::FullLift; PHASES];
            for s in &mut sup {
                s.last_command = limits.v_all_full;
            }
        }

        if power_on {
            for ph in 0..PHASES {
                if actions[ph].is_protective() {
                    metrics.protective_samples += 1;
                }
                if sup[ph].arc_success {
                    metrics.deviation[stage.index()].push(readings[ph].i - cfg.furnace.i_set);
                    metrics.arc_on_samples += 1;
                }
            }
        }

        if k % cfg.run.telemetry_every == 0 {
            let z_set = cfg.furnace.z_set;
            for ph in 0..PHASES {
                let r = &readings[ph];
                let s = &furnace.phases()[ph];
                sink.record(&TelemetryRow {
                    t,
                    phase: ph + 1,
                    state: actions[ph].name(),
                    u: commands[ph],
                    h: s.h,
                    v: s.v,
                    l_arc: s.l_arc,
                    i: r.i,
                    e2: r.e2,
                    z: r.z,
                    y: z_set * z_set / r.z,
                    e: errors[ph],
                    kp: used[ph].kp,
                    ki: used[ph].ki,
                    kd: used[ph].kd,
                    p: progress.p,
                    q: progress.q,
                    stage: stage.name(),
                })?;
            }
        }

        let power: f64 = readings.iter().map(|r| r.p_active).sum();
        progress = estimator.accumulate(&progress, power, power_on, t_c)?;
        if progress.stage != stage {
            metrics.stage_entry[progress.stage.index()] = Some(t + t_c);
        }
        furnace.advance(commands, progress.stage);
        metrics.duration = t + t_c;

        if progress.stage == crate::stage_estimator::Stage::Reduction && progress.q >= cfg.run.q_end
        {
            metrics.end = EndReason::Finished;
            break;
        }
    }
    metrics.energy = progress.w_throw;
    sink.finish()?;
    Ok(metrics)
}

/// Seed of charge `index` in a batch starting at `seed`.
pub fn charge_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// Runs `charges` charges in parallel without telemetry.
pub fn run_batch(cfg: &Config, mode: Mode, seed: u64, charges: usize) -> Result<MetricsReport> {
    let runs = (0..charges)
        .into_par_iter()
        .map(|n| run_charge(cfg, mode, charge_seed(seed, n), &mut NullSink))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::new(mode, runs))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn csv_sink(path: &Path) -> Result<CsvSink<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    Ok(CsvSink::new(BufWriter::new(file)))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Telemetry file of one charge.
pub fn charge_file(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("charge_{index:03}.csv"))
}

/// Runs `charges` charges of one mode, writing `charge_NNN.csv` per charge
/// and `report.json` into `out`.
pub fn simulate(
    cfg: &Config,
    mode: Mode,
    seed: u64,
    charges: usize,
    out: &Path,
) -> Result<MetricsReport> {
    if charges == 0 {
        return Err(config("at least one charge is required"));
    }
    create_dir(out)?;
    let runs = (0..charges)
        .into_par_iter()
        .map(|n| {
            let mut sink = csv_sink(&charge_file(out, n))?;
            run_charge(cfg, mode, charge_seed(seed, n), &mut sink)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = MetricsReport::new(mode, runs);
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

/// Runs every mode over the same seeds. With `out`, each mode writes its
/// telemetry into a subdirectory named after it, and the comparison goes to
/// `comparison.txt` and `comparison.json`.
pub fn compare(cfg: &Config, seed: u64, charges: usize, out: Option<&Path>) -> Result<Comparison> {
    if charges == 0 {
        return Err(config("at least one charge is required"));
    }
    let reports = Mode::ALL
        .into_par_iter()
        .map(|mode| match out {
            Some(dir) => simulate(cfg, mode, seed, charges, &dir.join(mode.name())),
            None => run_batch(cfg, mode, seed, charges),
        })
        .collect::<Result<Vec<_>>>()?;
    let comparison = Comparison { seed, reports };
    if let Some(dir) = out {
        let path = dir.join("comparison.txt");
        std::fs::write(&path, comparison.table()).map_err(|e| io_err(&path, e))?;
        write_json(&dir.join("comparison.json"), &comparison)?;
    }
    Ok(comparison)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("pid".parse::<Mode>().is_err());
    }

    #[test]
    fn current_baseline_folds_sign() {
        let params = PidParams::for_setpoint(0.1, 24000.0);
        let g = PidGains::new(1e-4, 0.0, 0.0);
        let reg = Mode::CurrentPid.regulation(15.0, 24000.0);
        // current below setpoint: arc too long, lower the electrode
        let (u, _) = baseline_command(reg, &g, &PidState::default(), 1000.0, &params);
        assert!(u < 0.0);
        let reg = Mode::ImpedancePid.regulation(15.0, 24000.0);
        let (u, _) = baseline_command(reg, &g, &PidState::default(), 1000.0, &params);
        assert!(u > 0.0);
    }
}
