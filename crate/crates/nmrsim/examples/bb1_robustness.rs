//! Single pulse versus the BB1 composite rotation under a systematic
//! amplitude miscalibration: the composite turns a quadratic error law
//! into a sixth-power one.

use nmrsim::control::{bb1, composite_infidelity, rotation_propagator, RotationSpec};
use nmrsim::operators::avg_gate_fidelity;
use std::f64::consts::PI;

fn main() -> nmrsim::Result<()> {
    let theta = PI / 2.0;
    let seq = bb1(theta)?;
    let ideal = rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], theta, 1), 1)?;
    println!("    ε     single-pulse    BB1          21π⁶ε⁶/16384");
    for i in 0..=10 {
        let eps = 0.02 * i as f64;
        let single = 1.0
            - avg_gate_fidelity(
                &ideal,
                &rotation_propagator(
                    &RotationSpec::new([1.0, 0.0, 0.0], theta, 1).with_error(eps),
                    1,
                )?,
            )?;
        let comp = composite_infidelity(&seq, &ideal, eps, 1)?;
        let pred = 21.0 * PI.powi(6) * eps.powi(6) / 16384.0;
        println!("{eps:6.2}   {single:12.3e} {comp:12.3e} {pred:12.3e}");
    }
    println!("\n(run the bb1_sweep experiment for the fitted slopes and CSV output)");
    Ok(())
}
