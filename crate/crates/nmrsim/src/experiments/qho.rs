//! Truncated harmonic oscillator mapped onto two spins: the four-level
//! ladder |n⟩ ↔ |q1 q2⟩ evolves under diagonal phases e^{−i(n+½)ΩT},
//! realized as frame-z evolutions on the spin pair.
//!
//! The encoding oracle enumerates all eight sign/ordering conventions for
//! the published two-spin form exp{i(2I_z²(1+I_z¹)−2)ΩT} and compares each
//! against the oscillator propagator; no convention reproduces it (the
//! n=2/n=3 phases stay swapped at best), so the oscillator propagator is
//! implemented directly and the oracle table is recorded in the manifest.

use nalgebra::DVector;
use serde_json::{json, Map, Value};

use super::{dft_energies, Context};
use crate::operators::{c64, State};
use crate::presets::chloroform;
use crate::sequence::{run_program, Event, PulseMode, PulseProgram};
use crate::Result;

pub fn defaults() -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("oscillator_hz".into(), json!(25.0));
    m.insert("n_periods".into(), json!(2));
    m.insert("samples_per_period".into(), json!(32));
    m
}

/// Oscillator phases −(n+½)ΩT for n = 0..3.
fn oscillator_phases(omega_t: f64) -> [f64; 4] {
    [0.5, 1.5, 2.5, 3.5].map(|h| -h * omega_t)
}

/// Diagonal phases of the published two-spin form under one of the eight
/// conventions: spin-role swap and a ±½ sign flip per spin.
fn two_spin_form_phases(omega_t: f64, swap: bool, flip1: bool, flip2: bool) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (n, o) in out.iter_mut().enumerate() {
        let (mut q1, mut q2) = ((n >> 1) & 1, n & 1);
        if swap {
            std::mem::swap(&mut q1, &mut q2);
        }
        let s1 = if q1 == 0 { 0.5 } else { -0.5 } * if flip1 { -1.0 } else { 1.0 };
        let s2 = if q2 == 0 { 0.5 } else { -0.5 } * if flip2 { -1.0 } else { 1.0 };
        *o = (2.0 * s2 * (1.0 + s1) - 2.0) * omega_t;
    }
    out
}

/// Max deviation of the phase pattern from the oscillator pattern after
/// removing the n=0 global phase; convention matches iff this vanishes for
/// all T, which reduces to the coefficients at T=1.
fn convention_deviation(swap: bool, flip1: bool, flip2: bool) -> f64 {
    let u = oscillator_phases(1.0);
    let v = two_spin_form_phases(1.0, swap, flip1, flip2);
    (1..4)
        .map(|n| ((v[n] - v[0]) - (u[n] - u[0])).abs())
        .fold(0.0, f64::max)
}

/// Frame-z program implementing exp{i(2I_z¹ + I_z² − 2)ΩT} — the diagonal
/// propagator whose phases are exactly the oscillator's, up to a global
/// phase.
fn oscillator_program(omega_t: f64) -> PulseProgram {
    PulseProgram::new(vec![
        Event::FrameZ { spin: 1, angle_rad: -2.0 * omega_t },
        Event::FrameZ { spin: 2, angle_rad: -omega_t },
    ])
}

fn initial_states() -> Vec<(&'static str, DVector<num_complex::Complex64>)> {
    let ground = DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
    let zero_i_two = DVector::from_vec(vec![
        c64(1.0, 0.0),
        c64(0.0, 0.0),
        c64(0.0, 1.0),
        c64(0.0, 0.0),
    ]);
    let equal = DVector::from_vec(vec![c64(1.0, 0.0); 4]);
    vec![
        ("ground", ground),
        ("zero_plus_i_two", zero_i_two),
        ("equal_superposition", equal),
    ]
}

pub fn run(ctx: &Context) -> Result<Value> {
    let nu = ctx.f64("oscillator_hz")?;
    let n_periods = ctx.usize("n_periods")?;
    let spp = ctx.usize("samples_per_period")?;
    let omega = 2.0 * std::f64::consts::PI * nu;
    let sys = chloroform();

    // encoding-convention oracle
    let mut table = Vec::new();
    let mut best: Option<(f64, String)> = None;
    for swap in [false, true] {
        for flip1 in [false, true] {
            for flip2 in [false, true] {
                let dev = convention_deviation(swap, flip1, flip2);
                let name = format!(
                    "swap={} flip1={} flip2={}",
                    swap as u8, flip1 as u8, flip2 as u8
                );
                if best.as_ref().map(|(d, _)| dev < *d).unwrap_or(true) {
                    best = Some((dev, name.clone()));
                }
                table.push(json!({ "convention": name, "max_phase_deviation": dev }));
            }
        }
    }
    let (best_dev, best_name) = best.expect("eight conventions");
    let matched = best_dev < 1e-12;

    // verify the frame-z program reproduces the oscillator phases exactly
    let probe_t = 0.37 / nu;
    let u = run_program(
        &oscillator_program(omega * probe_t),
        &sys,
        &State::maximally_mixed(2),
        PulseMode::Ideal,
    )?
    .total;
    let want = oscillator_phases(omega * probe_t);
    for n in 0..4 {
        let got = (u[(n, n)] / u[(0, 0)]).arg();
        let expect = want[n] - want[0];
        let diff = (got - expect).rem_euclid(2.0 * std::f64::consts::PI);
        let diff = diff.min(2.0 * std::f64::consts::PI - diff);
        if diff > 1e-10 {
            return Err(crate::Error::InvalidProgram(format!(
                "oscillator program phase {n} off by {diff:.2e}"
            )));
        }
    }

    let n_samples = n_periods * spp;
    let dt = 1.0 / (nu * spp as f64);
    let mut metrics_states = Vec::new();
    for (name, ket) in initial_states() {
        let rho0 = State::from_ket(&ket);
        let mut rows = Vec::with_capacity(n_samples);
        let mut overlaps = Vec::with_capacity(n_samples);
        for j in 0..n_samples {
            let t = j as f64 * dt;
            let out = run_program(
                &oscillator_program(omega * t),
                &sys,
                &rho0,
                PulseMode::Ideal,
            )?;
            let m = &out.state.matrix;
            let overlap = (&rho0.matrix * m).diagonal().sum().re;
            let c01 = m[(0, 1)];
            let c02 = m[(0, 2)];
            let c03 = m[(0, 3)];
            overlaps.push(overlap);
            rows.push(vec![
                t, overlap, c01.re, c01.im, c02.re, c02.im, c03.re, c03.im,
            ]);
        }
        ctx.csv(
            &format!("trace_{name}.csv"),
            &["t_s", "overlap", "re_c01", "im_c01", "re_c02", "im_c02", "re_c03", "im_c03"],
            &rows,
        )?;
        // spectral content of the overlap trace: bins are exact multiples
        // of Ω/n_periods, so Ω sits at bin n_periods, 2Ω at 2·n_periods...
        let energies = dft_energies(&overlaps);
        let total: f64 = energies.iter().skip(1).sum();
        let frac = |harmonic: usize| -> f64 {
            let bin = harmonic * n_periods;
            if total > 0.0 && bin < energies.len() {
                energies[bin] / total
            } else {
                0.0
            }
        };
        let flat = overlaps
            .iter()
            .map(|v| (v - overlaps[0]).abs())
            .fold(0.0, f64::max);
        metrics_states.push(json!({
            "state": name,
            "max_excursion": flat,
            "energy_fraction_omega": frac(1),
            "energy_fraction_2omega": frac(2),
            "energy_fraction_3omega": frac(3),
        }));
    }

    Ok(json!({
        "oscillator_hz": nu,
        "encoding_oracle": {
            "table": table,
            "best_convention": best_name,
            "best_deviation": best_dev,
            "matched": matched,
            "resolution": if matched {
                "two-spin form adopted under the matching convention"
            } else {
                "no convention reproduces the oscillator phases (n=2/n=3 stay swapped); \
                 the oscillator propagator is implemented directly as frame-z evolutions"
            },
        },
        "states": metrics_states,
    }))
}
