//! Local linear models of the electrode loop and their ISE index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy_pid::{pid_step, PidGains, PidParams, PidState};
use crate::plant_sim::{ArcCircuit, FurnaceConfig};
use crate::stage_estimator::Stage;

/// ISE assigned to trajectories that diverge, as a multiple of the
/// open-loop ISE. Any trajectory bounded by `DIVERGENCE_FACTOR` times the
/// step scores at most `DIVERGENCE_FACTOR^2` open-loop units, far below it.
const PENALTY_FACTOR: f64 = 1e6;
const DIVERGENCE_FACTOR: f64 = 100.0;

/// Small-signal model of the loop around one rule's premise peak.
///
/// Error dynamics with the servo lag normalised to unit gain:
///
/// ```text
/// T w' = u - w,     e' = -loop_gain * w
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalLinearModel {
    /// Melt progress at the operating point.
    pub p_point: f64,
    /// Scaled error magnitude at the operating point, mOhm.
    pub e_point: f64,
    pub stage: Stage,
    /// Scaled-variable setpoint, mOhm.
    pub y_set: f64,
    /// Arc length at the operating point, mm.
    pub arc_length: f64,
    /// Sensitivity of the scaled variable to electrode height, mOhm/mm.
    pub dy_dh: f64,
    /// Servo gain times `|dy/dh|`, mOhm/(V s). Positive by construction.
    pub loop_gain: f64,
    /// Servo lag, s.
    pub tau: f64,
    /// Transport delay, control cycles.
    pub delay: usize,
}

fn scaled_at(circuit: &ArcCircuit, y_set: f64, l: f64) -> f64 {
    let pt = circuit.solve(l);
    // y = Zs^2 / Z = Zs^2 I / (1000 E2)
    y_set * y_set * pt.i / (1000.0 * circuit.e2)
}

/// Linearizes the loop where the scaled error equals `+e_point`: the arc is
/// shorter than at the setpoint, which is the side where the plant gain is
/// smallest and electrode breaks are at stake.
pub fn linearize(
    cfg: &FurnaceConfig,
    p_point: f64,
    e_point: f64,
    stage: Stage,
) -> Result<LocalLinearModel> {
    let circuit = cfg.circuit_at(p_point);
    let y_set = cfg.z_set;
    let y_op = y_set + e_point;
    let i_op = y_op * 1000.0 * circuit.e2 / (y_set * y_set);
    let l = circuit.arc_length_for_current(i_op).ok_or_else(|| {
        Error::NoArc(format!(
            "scaled error {e_point} mOhm at p = {p_point} needs {i_op:.0} A"
        ))
    })?;

    let step = 1e-3;
    let dy_dh = if l > step {
        (scaled_at(&circuit, y_set, l + step) - scaled_at(&circuit, y_set, l - step)) / (2.0 * step)
    } else {
        (scaled_at(&circuit, y_set, l + step) - scaled_at(&circuit, y_set, l)) / step
    };
    if !(dy_dh < 0.0) {
        return Err(Error::NoArc(format!(
            "degenerate sensitivity {dy_dh} at l = {l} mm"
        )));
    }
    Ok(LocalLinearModel {
        p_point,
        e_point,
        stage,
        y_set,
        arc_length: l,
        dy_dh,
        loop_gain: -cfg.servo_gain * dy_dh,
        tau: cfg.servo_tau,
        delay: 0,
    })
}

impl LocalLinearModel {
    /// Error trajectory of the closed-loop response to a setpoint step of
    /// size `e_point`, sampled every `t_c` for `horizon` seconds. Stops early
    /// on divergence.
    pub fn step_response(&self, gains: &PidGains, horizon: f64, t_c: f64) -> Vec<f64> {
        let steps = (horizon / t_c).round() as usize;
        let params = PidParams::for_setpoint(t_c, self.y_set);
        let decay = (-t_c / self.tau).exp();
        let bound = DIVERGENCE_FACTOR * self.e_point.abs();

        let mut pid = PidState::default();
        let mut pending = vec![0.0; self.delay];
        let (mut e, mut w) = (self.e_point, 0.0);
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            out.push(e);
            if !e.is_finite() || e.abs() > bound {
                break;
            }
            let (u_new, next) = pid_step(&pid, gains, e, &params);
            pid = next;
            let u = if self.delay == 0 {
                u_new
            } else {
                pending.push(u_new);
                pending.remove(0)
            };
            // exact zero-order hold through the lag and the integrator
            let travel = u * t_c + (w - u) * self.tau * (1.0 - decay);
            w = u + (w - u) * decay;
            e -= self.loop_gain * travel;
        }
        out
    }

    /// Open-loop ISE `e_point^2 * horizon`.
    pub fn open_loop_ise(&self, horizon: f64) -> f64 {
        self.e_point * self.e_point * horizon
    }

    pub fn penalty(&self, horizon: f64) -> f64 {
        PENALTY_FACTOR * self.open_loop_ise(horizon)
    }
}

/// Integral of squared error of the step response, mOhm^2 s.
/// Divergent or non-finite responses score [`LocalLinearModel::penalty`].
pub fn ise(model: &LocalLinearModel, gains: &PidGains, horizon: f64, t_c: f64) -> f64 {
    let steps = (horizon / t_c).round() as usize;
    let traj = model.step_response(gains, horizon, t_c);
    let bound = DIVERGENCE_FACTOR * model.e_point.abs();
    if traj.len() < steps || traj.iter().any(|e| !e.is_finite() || e.abs() > bound) {
        return model.penalty(horizon);
    }
    traj.iter().map(|e| e * e).sum::<f64>() * t_c
}
