//! Gate-level circuit helpers for the algorithm experiments: dense
//! unitaries for the standard gate set, elementary-gate decompositions of
//! the multi-qubit gates, and the quantum Fourier transform.
//!
//! Qubit 1 is the leftmost tensor factor (most significant bit), matching
//! the spin ordering used everywhere else. `circuit_unitary` multiplies
//! gates in application order (first listed acts first).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::operators::{c64, identity, Operator};
use crate::{Error, Result};

/// One gate in a circuit. Controls and targets are 1-based qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// Phase e^{iθ} on |1⟩ of one qubit.
    Phase(usize, f64),
    CNot { control: usize, target: usize },
    /// diag(1,1,1,e^{iθ}) on the (control, target) pair.
    CPhase { control: usize, target: usize, theta: f64 },
    Swap(usize, usize),
    Toffoli { c1: usize, c2: usize, target: usize },
    /// Controlled swap.
    Fredkin { control: usize, a: usize, b: usize },
}

fn bit(n: usize, idx: usize, q: usize) -> usize {
    (idx >> (n - q)) & 1
}

fn flip(n: usize, idx: usize, q: usize) -> usize {
    idx ^ (1 << (n - q))
}

/// Dense unitary of one gate on an `n`-qubit register.
pub fn gate_unitary(n: usize, g: &Gate) -> Result<Operator> {
    let dim = 1usize << n;
    let check = |q: usize| -> Result<()> {
        if q < 1 || q > n {
            Err(Error::SpinOutOfRange { index: q, n_spins: n })
        } else {
            Ok(())
        }
    };
    let mut u = Operator::zeros(dim, dim);
    match *g {
        Gate::H(q) => {
            check(q)?;
            let s = c64(FRAC_1_SQRT_2, 0.0);
            for idx in 0..dim {
                let b = bit(n, idx, q);
                let other = flip(n, idx, q);
                // |0⟩→(|0⟩+|1⟩)/√2, |1⟩→(|0⟩−|1⟩)/√2
                u[(idx, idx)] = if b == 0 { s } else { -s };
                u[(other, idx)] = s;
            }
        }
        Gate::X(q) => {
            check(q)?;
            for idx in 0..dim {
                u[(flip(n, idx, q), idx)] = c64(1.0, 0.0);
            }
        }
        Gate::Phase(q, theta) => {
            check(q)?;
            let ph = c64(theta.cos(), theta.sin());
            for idx in 0..dim {
                u[(idx, idx)] = if bit(n, idx, q) == 1 { ph } else { c64(1.0, 0.0) };
            }
        }
        Gate::CNot { control, target } => {
            check(control)?;
            check(target)?;
            if control == target {
                return Err(Error::InvalidArgument("cnot control equals target".into()));
            }
            for idx in 0..dim {
                let out = if bit(n, idx, control) == 1 { flip(n, idx, target) } else { idx };
                u[(out, idx)] = c64(1.0, 0.0);
            }
        }
        Gate::CPhase { control, target, theta } => {
            check(control)?;
            check(target)?;
            let ph = c64(theta.cos(), theta.sin());
            for idx in 0..dim {
                let on = bit(n, idx, control) == 1 && bit(n, idx, target) == 1;
                u[(idx, idx)] = if on { ph } else { c64(1.0, 0.0) };
            }
        }
        Gate::Swap(a, b) => {
            check(a)?;
            check(b)?;
            for idx in 0..dim {
                let (ba, bb) = (bit(n, idx, a), bit(n, idx, b));
                let out = if ba != bb { flip(n, flip(n, idx, a), b) } else { idx };
                u[(out, idx)] = c64(1.0, 0.0);
            }
        }
        Gate::Toffoli { c1, c2, target } => {
            check(c1)?;
            check(c2)?;
            check(target)?;
            for idx in 0..dim {
                let on = bit(n, idx, c1) == 1 && bit(n, idx, c2) == 1;
                let out = if on { flip(n, idx, target) } else { idx };
                u[(out, idx)] = c64(1.0, 0.0);
            }
        }
        Gate::Fredkin { control, a, b } => {
            check(control)?;
            check(a)?;
            check(b)?;
            for idx in 0..dim {
                let on = bit(n, idx, control) == 1 && bit(n, idx, a) != bit(n, idx, b);
                let out = if on { flip(n, flip(n, idx, a), b) } else { idx };
                u[(out, idx)] = c64(1.0, 0.0);
            }
        }
    }
    Ok(u)
}

/// Expand a gate into the elementary set {H, Phase, CNot, CPhase}.
///
/// CCZ uses the phase-ledger identity
/// CP₂₃(π/2)·CNOT₁₂·CP₂₃(−π/2)·CNOT₁₂·CP₁₃(π/2) (time order), Toffoli is
/// H-conjugated CCZ, a swap is three CNOTs and a Fredkin is a
/// CNOT-conjugated Toffoli.
pub fn expand(g: &Gate) -> Vec<Gate> {
    match *g {
        Gate::Swap(a, b) => vec![
            Gate::CNot { control: a, target: b },
            Gate::CNot { control: b, target: a },
            Gate::CNot { control: a, target: b },
        ],
        Gate::Toffoli { c1, c2, target } => {
            let mut v = vec![Gate::H(target)];
            v.extend(ccz(c1, c2, target));
            v.push(Gate::H(target));
            v
        }
        Gate::Fredkin { control, a, b } => {
            let mut v = vec![Gate::CNot { control: b, target: a }];
            v.extend(expand(&Gate::Toffoli { c1: control, c2: a, target: b }));
            v.push(Gate::CNot { control: b, target: a });
            v
        }
        Gate::X(q) => vec![Gate::H(q), Gate::Phase(q, PI), Gate::H(q)],
        ref other => vec![other.clone()],
    }
}

fn ccz(q1: usize, q2: usize, q3: usize) -> Vec<Gate> {
    vec![
        Gate::CPhase { control: q1, target: q3, theta: PI / 2.0 },
        Gate::CNot { control: q1, target: q2 },
        Gate::CPhase { control: q2, target: q3, theta: -PI / 2.0 },
        Gate::CNot { control: q1, target: q2 },
        Gate::CPhase { control: q2, target: q3, theta: PI / 2.0 },
    ]
}

/// Ordered product of gate unitaries (first gate acts first).
pub fn circuit_unitary(n: usize, gates: &[Gate]) -> Result<Operator> {
    let mut u = identity(1 << n);
    for g in gates {
        u = gate_unitary(n, g)? * u;
    }
    Ok(u)
}

/// Expand every gate into the elementary set.
pub fn expand_all(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().flat_map(expand).collect()
}

/// Unitary permutation |w⟩ → |perm(w)⟩ on selected qubits, identity on the
/// rest, optionally controlled on one qubit.
pub fn controlled_permutation(
    n: usize,
    control: Option<usize>,
    qubits: &[usize],
    perm: &dyn Fn(usize) -> usize,
) -> Result<Operator> {
    let dim = 1usize << n;
    let m = qubits.len();
    let mut u = Operator::zeros(dim, dim);
    for idx in 0..dim {
        let active = control.map(|c| bit(n, idx, c) == 1).unwrap_or(true);
        let out = if active {
            let mut w = 0usize;
            for (pos, &q) in qubits.iter().enumerate() {
                w |= bit(n, idx, q) << (m - 1 - pos);
            }
            let wp = perm(w);
            if wp >= (1 << m) {
                return Err(Error::InvalidArgument("permutation leaves the register".into()));
            }
            let mut out = idx;
            for (pos, &q) in qubits.iter().enumerate() {
                let want = (wp >> (m - 1 - pos)) & 1;
                if bit(n, out, q) != want {
                    out = flip(n, out, q);
                }
            }
            out
        } else {
            idx
        };
        u[(out, idx)] = c64(1.0, 0.0);
    }
    // a permutation matrix is unitary iff the map is a bijection
    let prod = u.adjoint() * &u;
    if (prod - identity(dim)).norm() > 1e-12 {
        return Err(Error::InvalidArgument("permutation is not a bijection".into()));
    }
    Ok(u)
}

/// Quantum Fourier transform on `qubits` (first listed = most significant):
/// |x⟩ → 2^{−m/2} Σ_y e^{2πi x y / 2^m} |y⟩, identity elsewhere.
pub fn qft_unitary(n: usize, qubits: &[usize]) -> Result<Operator> {
    let dim = 1usize << n;
    let m = qubits.len();
    let reg = 1usize << m;
    let norm = 1.0 / (reg as f64).sqrt();
    let mut u = Operator::zeros(dim, dim);
    for idx in 0..dim {
        let mut x = 0usize;
        for (pos, &q) in qubits.iter().enumerate() {
            x |= bit(n, idx, q) << (m - 1 - pos);
        }
        for y in 0..reg {
            let mut out = idx;
            for (pos, &q) in qubits.iter().enumerate() {
                let want = (y >> (m - 1 - pos)) & 1;
                if bit(n, out, q) != want {
                    out = flip(n, out, q);
                }
            }
            let phase = 2.0 * PI * (x as f64) * (y as f64) / reg as f64;
            u[(out, idx)] = c64(phase.cos() * norm, phase.sin() * norm);
        }
    }
    Ok(u)
}

/// QFT as an elementary-gate network: Hadamards and controlled phases,
/// then the bit-reversal swaps.
pub fn qft_network(qubits: &[usize]) -> Vec<Gate> {
    let m = qubits.len();
    let mut gates = Vec::new();
    for i in 0..m {
        gates.push(Gate::H(qubits[i]));
        for j in (i + 1)..m {
            gates.push(Gate::CPhase {
                control: qubits[j],
                target: qubits[i],
                theta: PI / (1 << (j - i)) as f64,
            });
        }
    }
    for i in 0..m / 2 {
        gates.push(Gate::Swap(qubits[i], qubits[m - 1 - i]));
    }
    gates
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::avg_gate_fidelity;

    #[test]
    fn hadamard_squares_to_identity() {
        let h = gate_unitary(2, &Gate::H(1)).unwrap();
        assert!((&h * &h - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn expansions_match_direct_unitaries() {
        let cases = vec![
            (2, Gate::Swap(1, 2)),
            (3, Gate::Toffoli { c1: 1, c2: 2, target: 3 }),
            (3, Gate::Toffoli { c1: 3, c2: 1, target: 2 }),
            (3, Gate::Fredkin { control: 1, a: 2, b: 3 }),
            (4, Gate::Fredkin { control: 2, a: 4, b: 1 }),
            (1, Gate::X(1)),
        ];
        for (n, g) in cases {
            let direct = gate_unitary(n, &g).unwrap();
            let network = circuit_unitary(n, &expand(&g)).unwrap();
            let f = avg_gate_fidelity(&direct, &network).unwrap();
            assert!(f > 1.0 - 1e-12, "{g:?}: fidelity {f}");
        }
    }

    #[test]
    fn qft_network_matches_matrix() {
        for qubits in [vec![1usize, 2, 3], vec![2usize, 3, 4]] {
            let n = 4;
            let direct = qft_unitary(n, &qubits).unwrap();
            let network = circuit_unitary(n, &qft_network(&qubits)).unwrap();
            let f = avg_gate_fidelity(&direct, &network).unwrap();
            assert!(f > 1.0 - 1e-12, "qubits {qubits:?}: fidelity {f}");
        }
    }

    #[test]
    fn qft_of_basis_state_is_flat() {
        let u = qft_unitary(3, &[1, 2, 3]).unwrap();
        for r in 0..8 {
            assert!((u[(r, 0)].norm() - 1.0 / 8f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn controlled_permutation_respects_control() {
        // multiply-by-7 mod 15 on a 4-qubit register, controlled on qubit 1
        let mul7 = |w: usize| if w == 15 { 15 } else { (7 * w) % 15 };
        let u = controlled_permutation(5, Some(1), &[2, 3, 4, 5], &mul7).unwrap();
        // control clear: identity
        let idx = 0b0_0011; // w = 3
        assert!((u[(idx, idx)] - c64(1.0, 0.0)).norm() < 1e-12);
        // control set: 3 → 6
        let idx1 = 0b1_0011;
        let out1 = 0b1_0110;
        assert!((u[(out1, idx1)] - c64(1.0, 0.0)).norm() < 1e-12);
        // non-bijections rejected
        assert!(controlled_permutation(4, None, &[1, 2, 3, 4], &|_| 0).is_err());
    }

    #[test]
    fn gate_index_checks() {
        assert!(gate_unitary(2, &Gate::H(3)).is_err());
        assert!(gate_unitary(2, &Gate::CNot { control: 1, target: 1 }).is_err());
    }
}
