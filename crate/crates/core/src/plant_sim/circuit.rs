//! Single-phase RMS model of the arc circuit.
//!
//! The arc is a resistive voltage `U_arc = U_0 + g * l` in series with the
//! short-network resistance and reactance:
//!
//! ```text
//! E2^2 = (I R + U_arc)^2 + (I X)^2
//! ```
//!
//! Longer arcs draw less current at a larger impedance `Z = E2 / I`.

use serde::{Deserialize, Serialize};

/// Circuit constants at one instant of the charge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcCircuit {
    /// Secondary phase voltage, V.
    pub e2: f64,
    /// Short-network resistance, mOhm.
    pub r_short: f64,
    /// Short-network reactance, mOhm.
    pub x_react: f64,
    /// Arc voltage at zero length, V.
    pub arc_v_offset: f64,
    /// Arc voltage gradient, V/mm.
    pub arc_v_per_mm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitPoint {
    /// Arc current, A.
    pub i: f64,
    /// Secondary voltage, V.
    pub e2: f64,
    /// Impedance, mOhm. Infinite when the arc is out.
    pub z: f64,
    /// Active power of this phase, kW.
    pub p_active: f64,
}

impl CircuitPoint {
    pub fn arc_out(e2: f64) -> Self {
        Self {
            i: 0.0,
            e2,
            z: f64::INFINITY,
            p_active: 0.0,
        }
    }

    pub fn has_current(&self) -> bool {
        self.i > 0.0
    }
}

impl ArcCircuit {
    pub fn arc_voltage(&self, l_arc: f64) -> f64 {
        self.arc_v_offset + self.arc_v_per_mm * l_arc.max(0.0)
    }

    /// Current for a given arc voltage, or `None` when the arc cannot burn.
    pub fn current_for_arc_voltage(&self, u_arc: f64) -> Option<f64> {
        if !(self.e2 > 0.0) || u_arc >= self.e2 {
            return None;
        }
        let r = self.r_short / 1000.0;
        let x = self.x_react / 1000.0;
        let a = r * r + x * x;
        let b = 2.0 * r * u_arc;
        let c = u_arc * u_arc - self.e2 * self.e2;
        // positive root of a i^2 + b i + c = 0 with c < 0, cancellation-free
        Some(-2.0 * c / (b + (b * b - 4.0 * a * c).sqrt()))
    }

    /// Inverse of the current relation: arc voltage that draws `i` amperes.
    pub fn arc_voltage_for_current(&self, i: f64) -> Option<f64> {
        let ix = i * self.x_react / 1000.0;
        if !(i > 0.0) || ix >= self.e2 {
            return None;
        }
        Some((self.e2 * self.e2 - ix * ix).sqrt() - i * self.r_short / 1000.0)
    }

    /// Arc length that draws `i` amperes, if it is nonnegative.
    pub fn arc_length_for_current(&self, i: f64) -> Option<f64> {
        let u = self.arc_voltage_for_current(i)?;
        let l = (u - self.arc_v_offset) / self.arc_v_per_mm;
        (l >= 0.0).then_some(l)
    }

    pub fn solve(&self, l_arc: f64) -> CircuitPoint {
        let u_arc = self.arc_voltage(l_arc);
        match self.current_for_arc_voltage(u_arc) {
            Some(i) => CircuitPoint {
                i,
                e2: self.e2,
                z: 1000.0 * self.e2 / i,
                p_active: i * (i * self.r_short / 1000.0 + u_arc) / 1000.0,
            },
            None => CircuitPoint::arc_out(self.e2.max(0.0)),
        }
    }
}

/// Free-function form of [`ArcCircuit::solve`].
pub fn circuit_solve(circuit: &ArcCircuit, l_arc: f64) -> CircuitPoint {
    circuit.solve(l_arc)
}
