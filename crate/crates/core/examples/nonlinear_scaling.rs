//! Compares the plain impedance error with the scaled error around the
//! setpoint. The scaled error weighs a short arc more than a long one by the
//! same impedance offset, and is proportional to the current error.

use eaf_control::scaling::{scaled_error, scaled_variable, OperatingPoint};

fn main() -> eaf_control::Result<()> {
    let z_set = 15.0;
    println!("{:>8}  {:>9}  {:>9}  {:>9}", "Z mOhm", "Zs - Z", "y", "e");
    for z in [6.0, 9.0, 12.0, 14.0, 15.0, 16.0, 18.0, 21.0, 24.0, 30.0] {
        println!(
            "{z:>8.1}  {:>9.3}  {:>9.3}  {:>9.3}",
            z_set - z,
            scaled_variable(z, z_set)?,
            scaled_error(z, z_set)?
        );
    }

    let e2 = 360.0;
    println!("\nat E2 = {e2} V the scaled error tracks the current error:");
    for i in [18_000.0, 22_000.0, 24_000.0, 26_000.0, 30_000.0] {
        let op = OperatingPoint::from_measurement(e2, i, z_set)?;
        let slope = z_set * z_set / (1000.0 * e2);
        println!(
            "  I {i:>7.0} A  e {:>7.3} mOhm  slope * (I - Is) {:>7.3}",
            op.scaled_error(),
            slope * (i - op.current_setpoint())
        );
    }
    Ok(())
}
