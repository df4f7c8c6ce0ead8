//! Nonlinear scaling of the impedance error.
//!
//! Regulating the impedance `Z = E2 / I` directly biases the mean arc current
//! upwards whenever the arc fluctuates, because `I` is a hyperbolic function
//! of `Z`. The scaled variable `y = Zs^2 / Z = (Zs^2 / E2) * I` is linear in
//! the current, equals `Zs` at the setpoint and vanishes as `Z` grows without
//! bound. Driving `y - Zs` to zero on average therefore centres the current
//! on its own setpoint.
//!
//! Impedances are in milliohm throughout.

use crate::error::{domain, Result};

fn check(z: f64, z_set: f64) -> Result<()> {
    if !(z > 0.0) || z.is_nan() {
        return Err(domain(format!("impedance must be positive, got {z} mOhm")));
    }
    if !(z_set > 0.0 && z_set.is_finite()) {
        return Err(domain(format!(
            "impedance setpoint must be positive and finite, got {z_set} mOhm"
        )));
    }
    Ok(())
}

/// `y(Z) = Zs^2 / Z`. An infinite impedance (no current) maps to zero.
pub fn scaled_variable(z: f64, z_set: f64) -> Result<f64> {
    check(z, z_set)?;
    Ok(z_set * z_set / z)
}

/// `e = y - y_s = (Zs / Z) (Zs - Z)`: positive when the arc is too short.
pub fn scaled_error(z: f64, z_set: f64) -> Result<f64> {
    check(z, z_set)?;
    Ok(z_set / z * (z_set - z))
}

/// Per-phase electrical operating point in RMS quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    /// Impedance, mOhm.
    pub z: f64,
    /// Impedance setpoint, mOhm.
    pub z_set: f64,
    /// Arc current, A.
    pub i_arc: f64,
    /// Secondary phase voltage, V.
    pub e2: f64,
}

impl OperatingPoint {
    /// Builds the point from measured voltage and current; `z = 1000 e2 / i`.
    pub fn from_measurement(e2: f64, i_arc: f64, z_set: f64) -> Result<Self> {
        if !(e2 > 0.0 && e2.is_finite()) {
            return Err(domain(format!(
                "secondary voltage must be positive, got {e2} V"
            )));
        }
        if !(i_arc > 0.0 && i_arc.is_finite()) {
            return Err(domain(format!(
                "arc current must be positive, got {i_arc} A"
            )));
        }
        let z = 1000.0 * e2 / i_arc;
        check(z, z_set)?;
        Ok(Self {
            z,
            z_set,
            i_arc,
            e2,
        })
    }

    pub fn scaled_variable(&self) -> f64 {
        self.z_set * self.z_set / self.z
    }

    pub fn scaled_error(&self) -> f64 {
        self.z_set / self.z * (self.z_set - self.z)
    }

    /// Current that corresponds to the impedance setpoint at this voltage.
    pub fn current_setpoint(&self) -> f64 {
        1000.0 * self.e2 / self.z_set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_variable_examples() {
        assert_eq!(scaled_variable(6.0, 6.0).unwrap(), 6.0);
        assert_eq!(scaled_variable(12.0, 6.0).unwrap(), 3.0);
        assert_eq!(scaled_variable(3.0, 6.0).unwrap(), 12.0);
    }

    #[test]
    fn scaled_error_examples() {
        assert_eq!(scaled_error(6.0, 6.0).unwrap(), 0.0);
        assert_eq!(scaled_error(12.0, 6.0).unwrap(), -3.0);
        assert_eq!(scaled_error(3.0, 6.0).unwrap(), 6.0);
    }

    #[test]
    fn infinite_impedance_scales_to_zero() {
        assert_eq!(scaled_variable(f64::INFINITY, 6.0).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_impedance_is_a_domain_error() {
        assert!(scaled_variable(0.0, 6.0).is_err());
        assert!(scaled_error(-1.0, 6.0).is_err());
        assert!(scaled_error(1.0, 0.0).is_err());
        assert!(scaled_error(f64::NAN, 6.0).is_err());
    }

    #[test]
    fn operating_point_matches_free_functions() {
        let op = OperatingPoint::from_measurement(360.0, 20_000.0, 15.0).unwrap();
        assert!((op.z - 18.0).abs() < 1e-12);
        assert_eq!(op.scaled_error(), scaled_error(op.z, 15.0).unwrap());
        assert!((op.current_setpoint() - 24_000.0).abs() < 1e-9);
        assert!(OperatingPoint::from_measurement(360.0, 0.0, 15.0).is_err());
    }
}
