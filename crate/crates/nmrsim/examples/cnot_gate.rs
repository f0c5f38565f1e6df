//! Compiling a CNOT into the machine language of a two-spin system:
//! frame rotations, y pulses and one J evolution. The same program runs
//! with instantaneous rotations and with finite 25 kHz pulses.

use nmrsim::operators::{avg_gate_fidelity, State};
use nmrsim::presets::chloroform;
use nmrsim::sequence::{cnot_unitary, compile_cnot, run_program, Event, Pulse, PulseMode};

fn main() -> nmrsim::Result<()> {
    let sys = chloroform();
    let prog = compile_cnot(1, 2, &sys)?;
    println!("compiled events:");
    for e in prog.events() {
        match e {
            Event::Pulse { pulse: Pulse::Ideal(r) } => println!(
                "  pulse  spin {} angle {:7.2}° about ({:+.0},{:+.0},{:+.0})",
                r.spin,
                r.angle_rad.to_degrees(),
                r.axis[0],
                r.axis[1],
                r.axis[2]
            ),
            Event::Pulse { .. } => println!("  pulse  (shaped)"),
            Event::Delay { duration_s } => println!("  delay  {:.3} ms", duration_s * 1e3),
            Event::FrameZ { spin, angle_rad } => println!(
                "  framez spin {spin} angle {:7.2}°",
                angle_rad.to_degrees()
            ),
        }
    }

    let want = cnot_unitary(2, 1, 2);
    for (label, mode) in [
        ("ideal pulses", PulseMode::Ideal),
        ("finite 25 kHz", PulseMode::Finite { amplitude_hz: 25_000.0 }),
    ] {
        let out = run_program(&prog, &sys, &State::maximally_mixed(2), mode)?;
        let f = avg_gate_fidelity(&want, &out.total)?;
        println!("{label}: average gate fidelity {f:.12}");
    }

    // truth table under ideal pulses
    println!("truth table:");
    for input in 0..4usize {
        let out = run_program(&prog, &sys, &State::basis_state(2, input), PulseMode::Ideal)?;
        let p = out.state.populations();
        let best = p
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        println!("  |{input:02b}⟩ → |{best:02b}⟩  (p = {:.6})", p[best]);
    }
    Ok(())
}
