//! Electrode lifting servo: first-order lag `K / (T s + 1)` from command
//! voltage to electrode velocity. Positive commands raise the electrode.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServoParams {
    /// Velocity gain, (mm/s)/V.
    pub gain: f64,
    /// Time constant, s.
    pub tau: f64,
}

impl Default for ServoParams {
    fn default() -> Self {
        Self {
            gain: 15.0,
            tau: 0.1,
        }
    }
}

/// Exact zero-order-hold update of velocity `v` (mm/s) and position `h` (mm)
/// over `dt` seconds with command `u` held constant.
pub fn servo_update(servo: &ServoParams, h: f64, v: f64, u: f64, dt: f64) -> (f64, f64) {
    let target = servo.gain * u;
    let decay = (-dt / servo.tau).exp();
    let v_next = target + (v - target) * decay;
    let h_next = h + target * dt + (v - target) * servo.tau * (1.0 - decay);
    (h_next, v_next)
}

/// Velocity step response `K u (1 - exp(-t / T))` from rest.
pub fn analytic_step_velocity(servo: &ServoParams, u: f64, t: f64) -> f64 {
    servo.gain * u * (1.0 - (-t / servo.tau).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_stays_at_rest() {
        let (h, v) = servo_update(&ServoParams::default(), 10.0, 0.0, 0.0, 0.1);
        assert_eq!((h, v), (10.0, 0.0));
    }

    #[test]
    fn held_command_converges_to_gain() {
        let s = ServoParams::default();
        let (mut h, mut v) = (0.0, 0.0);
        for _ in 0..200 {
            (h, v) = servo_update(&s, h, v, 1.0, 0.01);
        }
        assert!((v - 15.0).abs() < 1e-6);
        assert!(h > 0.0);
    }

    #[test]
    fn one_time_constant_down() {
        let s = ServoParams::default();
        let (_, v) = servo_update(&s, 0.0, 0.0, -1.0, 0.1);
        let expected = -15.0 * (1.0 - (-1.0f64).exp());
        assert!((v - expected).abs() < 1e-12);
        assert!((v + 9.482).abs() < 1e-3);
    }

    #[test]
    fn position_is_velocity_integral() {
        // constant command from rest: h(t) = K u (t - T (1 - e^{-t/T}))
        let s = ServoParams::default();
        let (h, _) = servo_update(&s, 0.0, 0.0, 2.0, 0.3);
        let exact = 30.0 * (0.3 - 0.1 * (1.0 - (-3.0f64).exp()));
        assert!((h - exact).abs() < 1e-12);
    }
}
