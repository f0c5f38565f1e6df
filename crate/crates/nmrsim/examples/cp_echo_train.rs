//! Transverse magnetization of an inhomogeneously broadened ensemble,
//! with and without a Carr-Purcell π-pulse train: free decay collapses,
//! echo tops restore the signal.

use nmrsim::control::carr_purcell;
use nmrsim::operators::{c64, identity, spin_op, Axis, State, StateKind};
use nmrsim::sequence::{run_ensemble, Event, EnsembleSpec, PulseProgram};
use nmrsim::spin_system::SpinSystem;

fn main() -> nmrsim::Result<()> {
    let sys = SpinSystem::uncoupled(1, 0.0);
    let ens = EnsembleSpec::gaussian_b0(50.0, 21)?;
    let plus = State::new(
        identity(2) * c64(0.5, 0.0) + spin_op(1, 1, Axis::X)?,
        StateKind::Pure,
    )?;
    let magnetization = |state: &State| -> f64 {
        let mx = state.expect(&spin_op(1, 1, Axis::X).unwrap()).re;
        let my = state.expect(&spin_op(1, 1, Axis::Y).unwrap()).re;
        2.0 * (mx * mx + my * my).sqrt()
    };
    println!("  t/ms   free decay   echo top");
    let tau = 1.0e-3;
    for k in 1..=10usize {
        let t = 2.0 * k as f64 * tau;
        let free = run_ensemble(
            &PulseProgram::new(vec![Event::Delay(t)]),
            &sys,
            &plus,
            &ens,
        )?;
        let cp = run_ensemble(&carr_purcell(tau, k, 1)?, &sys, &plus, &ens)?;
        println!(
            "{:6.1}   {:10.5}   {:8.5}",
            t * 1e3,
            magnetization(&free),
            magnetization(&cp)
        );
    }
    Ok(())
}
