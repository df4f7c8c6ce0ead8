//! Discrete PID with separated integral action and a filtered derivative.
//!
//! ```text
//! u(k)   = u_p + u_i + u_d      if |e(k)| <= delta
//!        = u_p + u_d            otherwise
//! u_p    = K_P e(k)
//! u_i    = K_I T_c sum e(i)     (summed over in-band cycles only)
//! u_d(k) = lambda u_d(k-1) + (1 - lambda) K_D (e(k) - e(k-1)) / T_c
//! lambda = (T_d / (T_c n)) / (1 + T_d / (T_c n)),   T_d = K_D / K_P
//! ```

use serde::{Deserialize, Serialize};

/// Controller gains. `ki` is `K_P / T_i` and `kd` is `K_P * T_d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub const ZERO: PidGains = PidGains {
        kp: 0.0,
        ki: 0.0,
        kd: 0.0,
    };

    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }

    /// `T_d = K_D / K_P`, zero for a controller without proportional action.
    pub fn derivative_time(&self) -> f64 {
        if self.kp > 0.0 {
            self.kd / self.kp
        } else {
            0.0
        }
    }

    /// `T_i = K_P / K_I`; infinite when the integral gain is zero.
    pub fn integral_time(&self) -> f64 {
        if self.ki > 0.0 {
            self.kp / self.ki
        } else {
            f64::INFINITY
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.kp, self.ki, self.kd]
            .iter()
            .all(|g| g.is_finite() && *g >= 0.0)
    }
}

/// Per-phase controller memory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PidState {
    /// Running `sum e(i) T_c` over cycles inside the integration band.
    pub integral_sum: f64,
    /// Filtered derivative term `u_d(k-1)`.
    pub deriv_filtered: f64,
    pub e_prev: f64,
    /// Supervisor error accumulation `S(k) = sum e(i)`.
    pub s_accum: f64,
    /// Last command issued; held on a measurement fault.
    pub last_command: f64,
}

impl PidState {
    pub fn reset(&mut self) {
        *self = PidState::default();
    }
}

/// Fixed loop parameters shared by every cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PidParams {
    /// Control cycle, s.
    pub t_c: f64,
    /// Integration band half-width, same unit as the error.
    pub delta: f64,
    /// Derivative filter ratio.
    pub n: f64,
    /// Command saturation, V.
    pub u_max: f64,
}

impl PidParams {
    pub const DERIVATIVE_FILTER_N: f64 = 10.0;

    /// Band of `0.1 * y_s` around the setpoint, `n = 10`, +/-2.5 V output.
    pub fn for_setpoint(t_c: f64, y_set: f64) -> Self {
        Self {
            t_c,
            delta: 0.1 * y_set,
            n: Self::DERIVATIVE_FILTER_N,
            u_max: 2.5,
        }
    }
}

/// Pole of the real-derivative filter, `T_f / (T_c + T_f)` with `T_f = T_d / n`.
pub fn filter_lambda(t_d: f64, t_c: f64, n: f64) -> f64 {
    let r = t_d / (t_c * n);
    if r > 0.0 && r.is_finite() {
        r / (1.0 + r)
    } else {
        0.0
    }
}

/// One controller cycle. Returns the saturated command and the next state.
///
/// A non-finite error leaves the state untouched and repeats the previous
/// command.
pub fn pid_step(state: &PidState, gains: &PidGains, e: f64, params: &PidParams) -> (f64, PidState) {
    if !e.is_finite() {
        return (state.last_command, *state);
    }
    let mut next = *state;
    let t_c = params.t_c;
    let lambda = filter_lambda(gains.derivative_time(), t_c, params.n);

    let u_p = gains.kp * e;
    let u_d = lambda * state.deriv_filtered + (1.0 - lambda) * gains.kd * (e - state.e_prev) / t_c;
    let mut u = u_p + u_d;
    if e.abs() <= params.delta {
        next.integral_sum += e * t_c;
        u += gains.ki * next.integral_sum;
    }

    next.deriv_filtered = u_d;
    next.e_prev = e;
    let u = u.clamp(-params.u_max, params.u_max);
    next.last_command = u;
    (u, next)
}

/// Clears all controller memory.
pub fn reset(_state: &PidState) -> PidState {
    PidState::default()
}
