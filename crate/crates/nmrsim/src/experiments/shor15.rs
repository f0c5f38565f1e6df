//! Gate-level period finding on seven spins: a three-qubit register over a
//! four-qubit work register factors 15 with base 7.
//!
//! Controlled modular multiplications are explicit permutations — ×7 is a
//! bit rotation followed by a complement, ×4 a two-bit rotation — and the
//! elementary-gate networks (Fredkins and CNOTs, themselves expanded into
//! H/CNOT/CPhase) are validated against the permutation matrices before
//! the run. The register distribution lands exactly on {0, 2, 4, 6} with
//! weight ¼ each, and the classical tail recovers the factors 3 and 5.

use serde_json::{json, Map, Value};

use super::Context;
use crate::circuits::{
    circuit_unitary, controlled_permutation, expand_all, qft_unitary, Gate,
};
use crate::operators::{avg_gate_fidelity, State};
use crate::Result;

pub fn defaults() -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("base".into(), json!(7));
    m
}

const N_QUBITS: usize = 7;
const REGISTER: [usize; 3] = [1, 2, 3];
const WORK: [usize; 4] = [4, 5, 6, 7];

fn mul_mod15(m: usize) -> impl Fn(usize) -> usize {
    move |w: usize| if w == 15 { 15 } else { (m * w) % 15 }
}

/// The bit-level ×7: rotate right, then complement. Since 7 ≡ −8 (mod 15)
/// this equals ×7 mod 15 everywhere except that it exchanges the two
/// states (0 and 15) the algorithm never populates.
fn mul7_bits(w: usize) -> usize {
    let rot = ((w >> 1) | (w << 3)) & 0xF;
    !rot & 0xF
}

/// Elementary-gate network for the controlled multiply-by-7: rotate the
/// work bits right by one (three controlled swaps), then complement (four
/// CNOTs from the control).
fn controlled_mul7_gates(control: usize) -> Vec<Gate> {
    let mut v = vec![
        Gate::Fredkin { control, a: WORK[2], b: WORK[3] },
        Gate::Fredkin { control, a: WORK[1], b: WORK[2] },
        Gate::Fredkin { control, a: WORK[0], b: WORK[1] },
    ];
    for w in WORK {
        v.push(Gate::CNot { control, target: w });
    }
    v
}

/// Controlled multiply-by-4: rotate the work bits left by two.
fn controlled_mul4_gates(control: usize) -> Vec<Gate> {
    vec![
        Gate::Fredkin { control, a: WORK[0], b: WORK[2] },
        Gate::Fredkin { control, a: WORK[1], b: WORK[3] },
    ]
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn run(ctx: &Context) -> Result<Value> {
    let base = ctx.usize("base")?;
    if base != 7 {
        return Err(crate::Error::InvalidConfig(
            "this circuit is compiled for base 7".into(),
        ));
    }

    // the bit-level ×7 agrees with ×7 mod 15 on every populated state
    for w in 1..15usize {
        if mul7_bits(w) != (7 * w) % 15 {
            return Err(crate::Error::InvalidProgram(format!(
                "bit-level ×7 diverges from modular multiplication at w = {w}"
            )));
        }
    }
    // validate the gate networks against the explicit permutations
    let direct7 = controlled_permutation(N_QUBITS, Some(REGISTER[2]), &WORK, &mul_mod15(7))?;
    let bits7 = controlled_permutation(N_QUBITS, Some(REGISTER[2]), &WORK, &mul7_bits)?;
    let network7 = circuit_unitary(
        N_QUBITS,
        &expand_all(&controlled_mul7_gates(REGISTER[2])),
    )?;
    let f7 = avg_gate_fidelity(&bits7, &network7)?;
    let direct4 = controlled_permutation(N_QUBITS, Some(REGISTER[1]), &WORK, &mul_mod15(4))?;
    let network4 = circuit_unitary(
        N_QUBITS,
        &expand_all(&controlled_mul4_gates(REGISTER[1])),
    )?;
    let f4 = avg_gate_fidelity(&direct4, &network4)?;
    if f7 < 1.0 - 1e-9 || f4 < 1.0 - 1e-9 {
        return Err(crate::Error::InvalidProgram(format!(
            "modular-multiplication networks deviate from the permutations (F7 = {f7}, F4 = {f4})"
        )));
    }

    // |000⟩ ⊗ |0001⟩: work register starts at 1
    let mut state = State::basis_state(N_QUBITS, 1);
    for q in REGISTER {
        let h = crate::circuits::gate_unitary(N_QUBITS, &Gate::H(q))?;
        state = state.evolve(&h);
    }
    // modular exponentiation: 7^x = 7^(x0) · 4^(x1) · 1^(x2)
    state = state.evolve(&direct7);
    state = state.evolve(&direct4);

    let work_dist = state.marginal_populations(&WORK)?;
    let orbit: Vec<usize> = work_dist
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 1e-9)
        .map(|(w, _)| w)
        .collect();

    // inverse transform on the register, then diagonal readout
    let qft = qft_unitary(N_QUBITS, &REGISTER)?;
    state = state.evolve(&qft.adjoint());
    let register_dist = state.marginal_populations(&REGISTER)?;

    ctx.csv(
        "register_distribution.csv",
        &["value", "probability"],
        &register_dist
            .iter()
            .enumerate()
            .map(|(v, p)| vec![v as f64, *p])
            .collect::<Vec<_>>(),
    )?;
    ctx.csv(
        "work_distribution.csv",
        &["value", "probability"],
        &work_dist
            .iter()
            .enumerate()
            .map(|(v, p)| vec![v as f64, *p])
            .collect::<Vec<_>>(),
    )?;

    // classical tail: measured c/8 → continued fraction → candidate period
    let support: Vec<usize> = register_dist
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 1e-9)
        .map(|(c, _)| c)
        .collect();
    let mut period = 1u64;
    for &c in &support {
        if c == 0 {
            continue;
        }
        let denom = 8 / gcd(c as u64, 8);
        period = period * denom / gcd(period, denom);
    }
    let half = (base as u64).pow((period / 2) as u32) % 15;
    let mut factors = vec![
        gcd(half.saturating_sub(1).max(1), 15),
        gcd(half + 1, 15),
    ];
    factors.sort_unstable();
    factors.dedup();
    factors.retain(|&f| f != 1 && f != 15);

    Ok(json!({
        "register_distribution": register_dist,
        "register_support": support,
        "work_orbit": orbit,
        "work_distribution": work_dist,
        "period": period,
        "factors": factors,
        "network_fidelity_mul7": f7,
        "network_fidelity_mul4": f4,
    }))
}
