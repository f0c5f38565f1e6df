//! Two-qubit function classification: all four one-bit oracles evaluated
//! in a single query each; the query-spin readout separates constant from
//! balanced deterministically.

use serde_json::{json, Map, Value};

use super::programs::{hadamard_both, not_events, program};
use super::Context;
use crate::circuits::{circuit_unitary, Gate};
use crate::operators::{avg_gate_fidelity, State};
use crate::presets::chloroform;
use crate::sequence::{compile_cnot, run_program, PulseMode, PulseProgram};
use crate::spin_system::SpinSystem;
use crate::Result;

pub fn defaults() -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("finite_amplitude_hz".into(), json!(25_000.0));
    m
}

/// The four one-bit functions: f(x) = 0, 1, x, 1⊕x.
const ORACLES: [&str; 4] = ["constant_0", "constant_1", "identity", "negation"];

fn oracle_events(which: usize, sys: &SpinSystem) -> Result<Vec<crate::sequence::Event>> {
    Ok(match which {
        0 => vec![],
        1 => not_events(2),
        2 => compile_cnot(1, 2, sys)?.events().to_vec(),
        _ => {
            let mut v = compile_cnot(1, 2, sys)?.events().to_vec();
            v.extend(not_events(2));
            v
        }
    })
}

fn oracle_gates(which: usize) -> Vec<Gate> {
    match which {
        0 => vec![],
        1 => vec![Gate::X(2)],
        2 => vec![Gate::CNot { control: 1, target: 2 }],
        _ => vec![Gate::CNot { control: 1, target: 2 }, Gate::X(2)],
    }
}

fn dj_program(which: usize, sys: &SpinSystem) -> Result<PulseProgram> {
    Ok(program(vec![
        not_events(2), // |00⟩ → |01⟩
        hadamard_both(),
        oracle_events(which, sys)?,
        hadamard_both(),
    ]))
}

pub fn run(ctx: &Context) -> Result<Value> {
    let amplitude = ctx.f64("finite_amplitude_hz")?;
    let sys = chloroform();
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for which in 0..4usize {
        let prog = dj_program(which, &sys)?;
        // validate against the pure gate circuit first
        let u_prog = run_program(&prog, &sys, &State::maximally_mixed(2), PulseMode::Ideal)?
            .total;
        let mut gates = vec![Gate::X(2), Gate::H(1), Gate::H(2)];
        gates.extend(oracle_gates(which));
        gates.extend([Gate::H(1), Gate::H(2)]);
        let u_gate = circuit_unitary(2, &gates)?;
        let f = avg_gate_fidelity(&u_gate, &u_prog)?;
        if f < 1.0 - 1e-9 {
            return Err(crate::Error::InvalidProgram(format!(
                "dj program {which} deviates from the gate construction (F = {f})"
            )));
        }
        let classify = |mode: PulseMode| -> Result<(f64, &'static str)> {
            let out = run_program(&prog, &sys, &State::basis_state(2, 0), mode)?;
            let q = out.state.marginal_populations(&[1])?;
            Ok((q[1], if q[1] > 0.5 { "balanced" } else { "constant" }))
        };
        let (p1_ideal, verdict_ideal) = classify(PulseMode::Ideal)?;
        let (p1_finite, verdict_finite) =
            classify(PulseMode::Finite { amplitude_hz: amplitude })?;
        let expected = if which < 2 { "constant" } else { "balanced" };
        rows.push(vec![which as f64, p1_ideal, p1_finite]);
        verdicts.push(json!({
            "oracle": ORACLES[which],
            "expected": expected,
            "ideal": verdict_ideal,
            "finite": verdict_finite,
            "p_query_one_ideal": p1_ideal,
            "p_query_one_finite": p1_finite,
            "correct": verdict_ideal == expected && verdict_finite == expected,
        }));
    }
    ctx.csv(
        "query_populations.csv",
        &["oracle", "p_query_one_ideal", "p_query_one_finite"],
        &rows,
    )?;
    let all_correct = verdicts.iter().all(|v| v["correct"].as_bool().unwrap());
    Ok(json!({ "oracles": verdicts, "all_correct": all_correct }))
}
