//! Per-phase supervisory algorithm.
//!
//! Priority ladder evaluated every control cycle:
//!
//! 1. low voltage, danger current or over-current held for `t_over`:
//!    fast lift, and full-speed lift of all phases once the condition has
//!    lasted `t_escalate`;
//! 2. fresh over-current: slow lift;
//! 3. no arc: bore down at high speed;
//! 4. arc established: latch `arc_success`, accumulate the error and either
//!    stop inside the dead band or hand over to the PID.
//!
//! The escalation request is only a flag. Applying it to the sibling phases
//! is the caller's job.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{domain, Result};
use crate::fuzzy_pid::{pid_step, PidGains, PidParams, PidState};

/// Slack on timer comparisons so that multiples of the cycle time are not
/// lost to rounding.
const TIMER_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafetyLimits {
    /// Arc current setpoint, A.
    pub i_set: f64,
    /// Below this current there is no arc, A.
    pub i_noarc: f64,
    pub over_factor: f64,
    pub danger_factor: f64,
    pub lowvolt_factor: f64,
    /// Short-network reactance, mOhm.
    pub x_react: f64,
    pub stop_e_frac: f64,
    /// Dead-band limit on the error accumulation, mOhm.
    pub stop_s: f64,
    pub v_down_fast: f64,
    pub v_up_slow: f64,
    pub v_up_fast: f64,
    pub v_all_full: f64,
    /// Over-current tolerated at slow lift, s.
    pub t_over: f64,
    /// Fast-lift duration before all phases are raised, s.
    pub t_escalate: f64,
}

impl SafetyLimits {
    /// Default limits around the given current setpoint and reactance.
    pub fn new(i_set: f64, x_react: f64) -> Self {
        Self {
            i_set,
            i_noarc: 5000.0,
            over_factor: 1.25,
            danger_factor: 1.5,
            lowvolt_factor: 1.2,
            x_react,
            stop_e_frac: 0.1,
            stop_s: 100.0,
            v_down_fast: -1.0,
            v_up_slow: 0.3,
            v_up_fast: 1.5,
            v_all_full: 2.5,
            t_over: 1.0,
            t_escalate: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.i_set,
            self.i_noarc,
            self.over_factor,
            self.danger_factor,
            self.lowvolt_factor,
            self.x_react,
            self.stop_e_frac,
            self.stop_s,
            self.v_down_fast,
            self.v_up_slow,
            self.v_up_fast,
            self.v_all_full,
            self.t_over,
            self.t_escalate,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(domain("safety limits must be finite"));
        }
        if !(self.i_set > 0.0 && self.i_noarc >= 0.0 && self.x_react > 0.0) {
            return Err(domain("current setpoint and reactance must be positive"));
        }
        if !(0.0 < self.over_factor && self.over_factor < self.danger_factor) {
            return Err(domain("need 0 < over_factor < danger_factor"));
        }
        let speeds = [
            self.v_down_fast,
            self.v_up_slow,
            self.v_up_fast,
            self.v_all_full,
        ];
        if speeds.iter().any(|v| v.abs() > 2.5) {
            return Err(domain("electrode speed commands are limited to 2.5 V"));
        }
        if !(self.v_down_fast < 0.0
            && self.v_up_slow > 0.0
            && self.v_up_fast > 0.0
            && self.v_all_full > 0.0)
        {
            return Err(domain(
                "lift commands must be positive and the bore-down command negative",
            ));
        }
        if !(self.t_over > 0.0 && self.t_escalate > 0.0) {
            return Err(domain("supervisor timers must be positive"));
        }
        Ok(())
    }

    pub fn over_current(&self) -> f64 {
        self.over_factor * self.i_set
    }

    pub fn danger_current(&self) -> f64 {
        self.danger_factor * self.i_set
    }

    /// `e2 <= 1.2 * i * X`: almost the whole voltage drops across the reactance.
    pub fn is_low_voltage(&self, i: f64, e2: f64) -> bool {
        e2 <= self.lowvolt_factor * i * self.x_react / 1000.0
    }
}

/// One RMS sample of one phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    /// Arc current, A.
    pub i: f64,
    /// Secondary voltage, V.
    pub e2: f64,
    /// Impedance, mOhm; infinite when no current flows.
    pub z: f64,
}

/// Controlled quantity and its setpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regulation {
    /// `e = (Zs / Z)(Zs - Z)`, mOhm.
    ScaledImpedance { z_set: f64 },
    /// `e = Zs - Z`, mOhm.
    Impedance { z_set: f64 },
    /// `e = Is - I`, A. Positive error means the arc is too long, so the
    /// command is negated.
    Current { i_set: f64, z_set: f64 },
}

impl Regulation {
    pub fn error(&self, meas: &Measurement) -> f64 {
        match *self {
            Regulation::ScaledImpedance { z_set } => z_set / meas.z * (z_set - meas.z),
            Regulation::Impedance { z_set } => z_set - meas.z,
            Regulation::Current { i_set, .. } => i_set - meas.i,
        }
    }

    /// Setpoint of the regulated quantity in its own unit.
    pub fn reference(&self) -> f64 {
        match *self {
            Regulation::ScaledImpedance { z_set } | Regulation::Impedance { z_set } => z_set,
            Regulation::Current { i_set, .. } => i_set,
        }
    }

    /// Converts a milliohm threshold into the unit of this error.
    pub fn from_milliohm(&self, value: f64) -> f64 {
        match *self {
            Regulation::ScaledImpedance { .. } | Regulation::Impedance { .. } => value,
            Regulation::Current { i_set, z_set } => value * i_set / z_set,
        }
    }

    pub fn polarity(&self) -> f64 {
        match self {
            Regulation::Current { .. } => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    BoreDown,
    SlowLift,
    FastLift,
    FullLift,
    Stop,
    Regulate,
    PowerOff,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::BoreDown => "bore-down",
            Action::SlowLift => "slow-lift",
            Action::FastLift => "fast-lift",
            Action::FullLift => "full-lift",
            Action::Stop => "stop",
            Action::Regulate => "regulate",
            Action::PowerOff => "power-off",
        }
    }

    pub fn is_protective(self) -> bool {
        matches!(self, Action::SlowLift | Action::FastLift | Action::FullLift)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SupervisorState {
    pub arc_success: bool,
    /// Start of the open over-current episode, s.
    pub overcurrent_since: Option<f64>,
    /// Start of the open fast-lift condition, s.
    pub highlift_since: Option<f64>,
    pub last_command: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupervisorOutput {
    /// Electrode command for this phase, V.
    pub command: f64,
    /// Raise every phase at full speed this cycle.
    pub escalate_all: bool,
    pub action: Action,
    /// Regulation error, when the electrode was under error control.
    pub error: Option<f64>,
    pub state: SupervisorState,
    pub pid: PidState,
}

/// `S(k) = S(k-1) + e(k)`.
pub fn accumulate_error(pid: &PidState, e: f64) -> PidState {
    PidState {
        s_accum: pid.s_accum + e,
        ..*pid
    }
}

fn elapsed(since: Option<f64>, now: f64) -> f64 {
    since.map_or(0.0, |t0| now - t0)
}

/// One supervisory cycle. Total: every finite measurement yields a command.
#[allow(clippy::too_many_arguments)]
pub fn supervise(
    state: &SupervisorState,
    limits: &SafetyLimits,
    meas: &Measurement,
    regulation: Regulation,
    pid: &PidState,
    gains: &PidGains,
    params: &PidParams,
    now: f64,
) -> SupervisorOutput {
    let mut st = *state;
    let mut pid = *pid;

    let over = meas.i >= limits.over_current();
    let danger = meas.i >= limits.danger_current();
    let low_voltage = limits.is_low_voltage(meas.i, meas.e2);
    let arc = meas.i >= limits.i_noarc;

    st.overcurrent_since = if over {
        Some(st.overcurrent_since.unwrap_or(now))
    } else {
        None
    };
    let over_sustained = over && elapsed(st.overcurrent_since, now) + TIMER_EPS >= limits.t_over;

    let high_lift = low_voltage || danger || over_sustained;
    st.highlift_since = if high_lift {
        Some(st.highlift_since.unwrap_or(now))
    } else {
        None
    };

    let mut escalate_all = false;
    let mut error = None;
    let (command, action) = if high_lift {
        if elapsed(st.highlift_since, now) + TIMER_EPS >= limits.t_escalate {
            escalate_all = true;
            (limits.v_all_full, Action::FullLift)
        } else {
            (limits.v_up_fast, Action::FastLift)
        }
    } else if over {
        (limits.v_up_slow, Action::SlowLift)
    } else if !arc {
        if st.arc_success {
            // arc lost: start the strike over with clean controller memory
            st.arc_success = false;
            pid = PidState::default();
        }
        (limits.v_down_fast, Action::BoreDown)
    } else {
        st.arc_success = true;
        let e = regulation.error(meas);
        error = Some(e);
        let band = limits.stop_e_frac * regulation.reference();
        let s_limit = regulation.from_milliohm(limits.stop_s);
        let candidate = accumulate_error(&pid, e);
        if e.abs() < band && candidate.s_accum.abs() < s_limit {
            pid.last_command = 0.0;
            (0.0, Action::Stop)
        } else {
            let (u, next) = pid_step(&candidate, gains, e, params);
            pid = next;
            (regulation.polarity() * u, Action::Regulate)
        }
    };

    st.last_command = command;
    SupervisorOutput {
        command,
        escalate_all,
        action,
        error,
        state: st,
        pid,
    }
}
