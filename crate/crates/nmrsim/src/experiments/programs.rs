//! Shared program fragments for the two-qubit algorithm experiments:
//! Hadamards from rotations and frame z's, and arbitrary two-spin diagonal
//! phase gates from frame z's plus one J evolution.

use std::f64::consts::PI;

use crate::control::RotationSpec;
use crate::sequence::{Event, Pulse, PulseProgram};
use crate::spin_system::SpinSystem;
use crate::{Error, Result};

/// Hadamard on one spin: R_y(−90°) then a frame z by π (H = Z·R_y(−90°)).
pub fn hadamard_events(spin: usize) -> Vec<Event> {
    vec![
        Event::Pulse(Pulse::Ideal(RotationSpec::new([0.0, 1.0, 0.0], -PI / 2.0, spin))),
        Event::FrameZ { spin, angle_rad: PI },
    ]
}

/// Events applying diag(e^{iφ₀₀}, e^{iφ₀₁}, e^{iφ₁₀}, e^{iφ₁₁}) on a
/// two-spin weak-J system, up to a global phase: two frame z's and one
/// J delay (with frame-z compensation of the spins' Zeeman phases).
pub fn diagonal_phase_events(phases: [f64; 4], sys: &SpinSystem) -> Result<Vec<Event>> {
    if sys.n_spins() != 2 {
        return Err(Error::InvalidArgument("diagonal phase gate is two-spin".into()));
    }
    let [p00, p01, p10, p11] = phases;
    // φ(q) = c + a·s1 + b·s2 + g·s1s2 with s = ±other½
    let a = 0.5 * ((p00 - p10) + (p01 - p11));
    let b = 0.5 * ((p00 - p01) + (p10 - p11));
    let g = (p00 - p01) - (p10 - p11);
    let mut events = Vec::new();
    // FrameZ(k, α) contributes −α·s_k
    if a != 0.0 {
        events.push(Event::FrameZ { spin: 1, angle_rad: -a });
    }
    if b != 0.0 {
        events.push(Event::FrameZ { spin: 2, angle_rad: -b });
    }
    // the delay contributes the coefficient −2πJτ on s1s2; since s1s2 = ±¼
    // the match must hold modulo 8π. Zeeman phases the delay adds are
    // cancelled right away.
    let residue = if sys.j_hz(1, 2) >= 0.0 {
        (-g).rem_euclid(8.0 * PI)
    } else {
        g.rem_euclid(8.0 * PI)
    };
    if residue > 1e-12 && residue < 8.0 * PI - 1e-12 {
        let j = sys.j_hz(1, 2);
        if j == 0.0 {
            return Err(Error::InvalidArgument("zz phase needs a nonzero coupling".into()));
        }
        let tau = residue / (2.0 * PI * j.abs());
        events.push(Event::Delay(tau));
        for k in 1..=2 {
            let nu = sys.offsets_hz()[k - 1];
            if nu != 0.0 {
                events.push(Event::FrameZ { spin: k, angle_rad: -2.0 * PI * nu * tau });
            }
        }
    }
    Ok(events)
}

/// Hadamards on both spins of a two-spin system.
pub fn hadamard_both() -> Vec<Event> {
    let mut v = hadamard_events(1);
    v.extend(hadamard_events(2));
    v
}

/// π rotation about x (a NOT up to phase) on one spin.
pub fn not_events(spin: usize) -> Vec<Event> {
    vec![Event::Pulse(Pulse::Ideal(RotationSpec::new([1.0, 0.0, 0.0], PI, spin)))]
}

/// Assemble a program from event groups.
pub fn program(groups: Vec<Vec<Event>>) -> PulseProgram {
    PulseProgram::new(groups.into_iter().flatten().collect())
}
