//! Dense complex operator algebra over the 2^N-dimensional Hilbert space of
//! N spin-1/2 nuclei.
//!
//! Operators are plain `DMatrix<Complex64>` values ([`Operator`]); density
//! matrices carry a purity tag ([`State`]). Spin-1/2 operators are
//! I_a = σ_a/2 with I_z = diag(½, −½), and the ladder operators are
//! I_± = I_x ± i·I_y. Tensor ordering: spin 1 is the leftmost factor.
//!
//! Matrix exponentials of Hermitian generators go through one
//! eigendecomposition ([`expm_hermitian`]); the scaling-and-squaring
//! fallback [`expm_general`] handles the non-Hermitian case (Liouville-space
//! generators and the like).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::{Error, Result};

/// Dense complex matrix over the spin Hilbert space.
pub type Operator = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-spin operator axis; `Plus`/`Minus` are the ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Quantization axis for coherence-order decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantization {
    Z,
    X,
}

/// Number of spins for a Hilbert-space dimension, erroring unless dim = 2^N.
pub fn n_spins_of_dim(dim: usize) -> Result<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::NotPowerOfTwo(dim))
    }
}

pub fn identity(dim: usize) -> Operator {
    DMatrix::identity(dim, dim)
}

/// The 2×2 spin-1/2 operator for one axis.
pub fn single_spin(axis: Axis) -> Operator {
    let h = 0.5;
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(h, 0.), c64(h, 0.), c64(0., 0.)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -h), c64(0., h), c64(0., 0.)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c64(h, 0.), c64(0., 0.), c64(0., 0.), c64(-h, 0.)]),
        Axis::Plus => DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]),
        Axis::Minus => DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 0.), c64(1., 0.), c64(0., 0.)]),
    }
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

/// I_axis on spin `k` (1-based) of an `n_spins` system, identity elsewhere.
pub fn spin_op(n_spins: usize, k: usize, axis: Axis) -> Result<Operator> {
    if k < 1 || k > n_spins {
        return Err(Error::SpinOutOfRange { index: k, n_spins });
    }
    let mut out = if k == 1 { single_spin(axis) } else { identity(2) };
    for j in 2..=n_spins {
        let factor = if j == k { single_spin(axis) } else { identity(2) };
        out = kron(&out, &factor);
    }
    Ok(out)
}

/// Σ_k I_axis^k over all spins.
pub fn collective_op(n_spins: usize, axis: Axis) -> Operator {
    let dim = 1 << n_spins;
    let mut out = Operator::zeros(dim, dim);
    for k in 1..=n_spins {
        out += spin_op(n_spins, k, axis).expect("k in range");
    }
    out
}

pub fn dagger(a: &Operator) -> Operator {
    a.adjoint()
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn trace(a: &Operator) -> Complex64 {
    a.diagonal().sum()
}

pub fn frobenius_norm(a: &Operator) -> f64 {
    a.norm()
}

/// Max elementwise |A − A†|.
pub fn hermiticity_deviation(a: &Operator) -> f64 {
    let d = a - a.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(a: &Operator, tol: f64) -> bool {
    hermiticity_deviation(a) <= tol
}

/// Eigendecomposition of a Hermitian matrix: (eigenvalues, eigenvectors).
///
/// Columns of the returned matrix are orthonormal eigenvectors; the
/// tolerance on Hermiticity scales with the largest entry.
pub fn eigh(h: &Operator) -> Result<(DVector<f64>, Operator)> {
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dev = hermiticity_deviation(h);
    if dev > 1e-12 * (1.0 + scale) {
        return Err(Error::NotHermitian(dev));
    }
    let se = h.clone().symmetric_eigen();
    Ok((se.eigenvalues, se.eigenvectors))
}

/// U = exp(−i·h·t) for Hermitian `h` (rad/s), via eigendecomposition.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    let (vals, vecs) = eigh(h)?;
    let mut scaled = vecs.clone();
    for (j, &e) in vals.iter().enumerate() {
        let phase = (-I * e * t).exp();
        for r in 0..scaled.nrows() {
            scaled[(r, j)] *= phase;
        }
    }
    Ok(scaled * vecs.adjoint())
}

/// exp(A) for a general square matrix by scaling and squaring with a Taylor
/// series on the scaled-down matrix. Fallback for non-Hermitian generators.
pub fn expm_general(a: &Operator) -> Operator {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.map(|z| z / 2f64.powi(s as i32));
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..=24 {
        term = &term * &scaled / c64(k as f64, 0.0);
        sum += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Average gate fidelity F = (d + |tr(u†v)|²) / (d(d+1)).
///
/// Invariant under a global phase on either argument.
pub fn avg_gate_fidelity(u: &Operator, v: &Operator) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity of {}×{} vs {}×{}",
            u.nrows(),
            u.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    let d = u.nrows() as f64;
    let t: Complex64 = (u.adjoint() * v).diagonal().sum();
    Ok((d + t.norm_sqr()) / (d * (d + 1.0)))
}

/// Total-I_z quantum number of a basis state (index bits, spin 1 at MSB).
fn zeeman_number(index: usize, n_spins: usize) -> f64 {
    let mut m = 0.0;
    for k in 0..n_spins {
        let bit = (index >> (n_spins - 1 - k)) & 1;
        m += if bit == 0 { 0.5 } else { -0.5 };
    }
    m
}

/// Decompose `a` into coherence-order components with respect to the
/// eigenbasis of total I_z or total I_x.
///
/// The component of order p connects eigenspaces whose quantum numbers
/// differ by p; the components sum to `a` exactly. Under a collective
/// rotation exp(−iφ ΣI_axis) the order-p component acquires the phase
/// e^(−ipφ).
pub fn coherence_order_decomposition(
    a: &Operator,
    axis: Quantization,
) -> Result<BTreeMap<i32, Operator>> {
    let dim = a.nrows();
    let n = n_spins_of_dim(dim)?;
    // Work in the quantization eigenbasis; for X, rotate so that the
    // total-I_x eigenbasis maps onto the computational basis.
    let (work, back) = match axis {
        Quantization::Z => (a.clone(), None),
        Quantization::X => {
            let u = expm_hermitian(&collective_op(n, Axis::Y), -std::f64::consts::FRAC_PI_2)?;
            (&u * a * u.adjoint(), Some(u))
        }
    };
    let mut comps: BTreeMap<i32, Operator> = BTreeMap::new();
    for r in 0..dim {
        for c in 0..dim {
            let z = work[(r, c)];
            if z == Complex64::ZERO {
                continue;
            }
            // order p: the component taking |c⟩ (number m_c) to |r⟩ (m_r);
            // differences of total-I_z numbers are integral
            let p = (zeeman_number(r, n) - zeeman_number(c, n)).round() as i32;
            comps
                .entry(p)
                .or_insert_with(|| Operator::zeros(dim, dim))[(r, c)] = z;
        }
    }
    if let Some(u) = back {
        let ud = u.adjoint();
        for comp in comps.values_mut() {
            *comp = &ud * &*comp * &u;
        }
    }
    Ok(comps)
}

/// Relative intensity ‖A_p‖² / ‖A‖² for each coherence order.
pub fn coherence_order_intensities(
    a: &Operator,
    axis: Quantization,
) -> Result<BTreeMap<i32, f64>> {
    let total = a.norm_squared();
    let comps = coherence_order_decomposition(a, axis)?;
    Ok(comps
        .into_iter()
        .map(|(p, m)| (p, if total > 0.0 { m.norm_squared() / total } else { 0.0 }))
        .collect())
}

/// Purity tag carried by a [`State`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
    /// Traceless deviation part of a density matrix.
    Deviation,
}

/// Density matrix (or traceless deviation matrix) with its purity tag.
#[derive(Debug, Clone)]
pub struct State {
    pub matrix: Operator,
    pub kind: StateKind,
}

impl State {
    /// Wrap a matrix after checking the tag's invariants: unit trace
    /// (traceless for deviations), Hermiticity, and — except for
    /// deviations — eigenvalues ≥ −1e-10.
    pub fn new(matrix: Operator, kind: StateKind) -> Result<Self> {
        let tr = trace(&matrix);
        let want = if kind == StateKind::Deviation { 0.0 } else { 1.0 };
        if (tr.re - want).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "trace {} (expected {want})",
                tr.re
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if hermiticity_deviation(&matrix) > 1e-10 * (1.0 + scale) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        if kind != StateKind::Deviation {
            let (vals, _) = eigh(&matrix)?;
            if vals.iter().any(|&v| v < -1e-10) {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {:.3e}",
                    vals.iter().cloned().fold(f64::INFINITY, f64::min)
                )));
            }
        }
        Ok(State { matrix, kind })
    }

    /// |ψ⟩⟨ψ| from a (normalized) ket.
    pub fn from_ket(ket: &DVector<Complex64>) -> Self {
        let norm = ket.norm();
        let k = ket / c64(norm, 0.0);
        State {
            matrix: &k * k.adjoint(),
            kind: StateKind::Pure,
        }
    }

    /// Pure computational basis state |index⟩ of an n-spin system.
    pub fn basis_state(n_spins: usize, index: usize) -> Self {
        let dim = 1 << n_spins;
        let mut ket = DVector::zeros(dim);
        ket[index] = c64(1.0, 0.0);
        Self::from_ket(&ket)
    }

    /// 1/2^N.
    pub fn maximally_mixed(n_spins: usize) -> Self {
        let dim = 1 << n_spins;
        State {
            matrix: identity(dim) / c64(dim as f64, 0.0),
            kind: StateKind::Mixed,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_spins(&self) -> Result<usize> {
        n_spins_of_dim(self.dim())
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &Operator) -> State {
        State {
            matrix: u * &self.matrix * u.adjoint(),
            kind: self.kind,
        }
    }

    /// tr(ρ O).
    pub fn expect(&self, op: &Operator) -> Complex64 {
        (&self.matrix * op).diagonal().sum()
    }

    /// Traceless part ρ − tr(ρ)/d.
    pub fn deviation(&self) -> State {
        let d = self.dim();
        let tr = trace(&self.matrix) / c64(d as f64, 0.0);
        State {
            matrix: &self.matrix - identity(d) * tr,
            kind: StateKind::Deviation,
        }
    }

    /// Diagonal populations, in basis order.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Populations of a subset of spins (1-based), marginalized over the
    /// rest. Entry `v` corresponds to the bit pattern of `spins` in the
    /// listed order.
    pub fn marginal_populations(&self, spins: &[usize]) -> Result<Vec<f64>> {
        let n = self.n_spins()?;
        for &s in spins {
            if s < 1 || s > n {
                return Err(Error::SpinOutOfRange { index: s, n_spins: n });
            }
        }
        let mut out = vec![0.0; 1 << spins.len()];
        for (idx, z) in self.matrix.diagonal().iter().enumerate() {
            let mut v = 0usize;
            for (pos, &s) in spins.iter().enumerate() {
                let bit = (idx >> (n - s)) & 1;
                v |= bit << (spins.len() - 1 - pos);
            }
            out[v] += z.re;
        }
        Ok(out)
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.matrix.norm_squared()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_hermitian(dim: usize, rng: &mut ChaCha12Rng) -> Operator {
        let m = Operator::from_fn(dim, dim, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&m + m.adjoint()) / c64(2.0, 0.0)
    }

    #[test]
    fn spin_z_diagonals() {
        let iz1 = spin_op(1, 1, Axis::Z).unwrap();
        assert_eq!(iz1[(0, 0)], c64(0.5, 0.0));
        assert_eq!(iz1[(1, 1)], c64(-0.5, 0.0));
        let iz2 = spin_op(2, 2, Axis::Z).unwrap();
        let diag: Vec<f64> = iz2.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn spin_index_out_of_range() {
        assert!(spin_op(2, 3, Axis::X).is_err());
        assert!(spin_op(2, 0, Axis::X).is_err());
    }

    #[test]
    fn angular_momentum_algebra() {
        for n in 1..=3 {
            for k in 1..=n {
                let ix = spin_op(n, k, Axis::X).unwrap();
                let iy = spin_op(n, k, Axis::Y).unwrap();
                let iz = spin_op(n, k, Axis::Z).unwrap();
                let lhs = commutator(&ix, &iy);
                let rhs = iz.map(|z| z * I);
                assert!((lhs - rhs).norm() < 1e-14, "[Ix,Iy] = iIz failed at n={n} k={k}");
            }
        }
    }

    #[test]
    fn ladder_operators() {
        let ix = spin_op(2, 1, Axis::X).unwrap();
        let iy = spin_op(2, 1, Axis::Y).unwrap();
        let ip = spin_op(2, 1, Axis::Plus).unwrap();
        let im = spin_op(2, 1, Axis::Minus).unwrap();
        assert!((&ix + iy.map(|z| z * I) - &ip).norm() < 1e-15);
        assert!((&ix - iy.map(|z| z * I) - &im).norm() < 1e-15);
    }

    #[test]
    fn kron_identities() {
        let i2 = identity(2);
        assert!((kron(&i2, &i2) - identity(4)).norm() < 1e-15);
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![c64(1., 0.), c64(0., 0.)]));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![c64(0., 0.), c64(1., 0.)]));
        let k = kron(&a, &b);
        let diag: Vec<f64> = k.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn kron_trace_is_product_of_traces() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(2, &mut rng);
            let lhs = trace(&kron(&a, &b));
            let rhs = trace(&a) * trace(&b);
            assert!((lhs - rhs).norm() < 1e-12);
            // elementwise oracle on one random entry
            let (r, c) = (rng.random_range(0..8), rng.random_range(0..8));
            let expect = a[(r / 2, c / 2)] * b[(r % 2, c % 2)];
            assert!((kron(&a, &b)[(r, c)] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_zero_is_identity() {
        let h = Operator::zeros(4, 4);
        let u = expm_hermitian(&h, 3.7).unwrap();
        assert!((u - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn expm_pi_pulse_is_minus_i_pauli_x() {
        // exp(−iθ I_x) at θ=π equals −2i·I_x = −i·σ_x
        let ix = single_spin(Axis::X);
        let u = expm_hermitian(&ix, std::f64::consts::PI).unwrap();
        let expect = ix.map(|z| z * c64(0.0, -2.0));
        assert!((u - expect).norm() < 1e-12);
    }

    #[test]
    fn expm_unitarity_inverse_and_semigroup() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let h = random_hermitian(8, &mut rng);
        let u = expm_hermitian(&h, 0.83).unwrap();
        assert!((u.adjoint() * &u - identity(8)).norm() < 1e-10);
        let v = expm_hermitian(&h, -0.83).unwrap();
        assert!((&u * v - identity(8)).norm() < 1e-10);
        let u1 = expm_hermitian(&h, 0.31).unwrap();
        let u2 = expm_hermitian(&h, 0.52).unwrap();
        assert!((u1 * u2 - u).norm() < 1e-9);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let mut m = Operator::zeros(2, 2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(expm_hermitian(&m, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn expm_general_matches_hermitian_path() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let h = random_hermitian(6, &mut rng);
        let a = h.map(|z| -I * z * 0.7);
        let lhs = expm_general(&a);
        let rhs = expm_hermitian(&h, 0.7).unwrap();
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let u = expm_hermitian(&h, 1.0).unwrap();
        assert!((avg_gate_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        let phased = u.map(|z| z * (I * 0.73).exp());
        assert!((avg_gate_fidelity(&u, &phased).unwrap() - 1.0).abs() < 1e-12);
        let x = single_spin(Axis::X).map(|z| z * 2.0); // Pauli X
        let f = avg_gate_fidelity(&identity(2), &x).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-12);
        // symmetry and bounds
        let g = random_hermitian(4, &mut rng);
        let v = expm_hermitian(&g, 1.0).unwrap();
        let f1 = avg_gate_fidelity(&u, &v).unwrap();
        let f2 = avg_gate_fidelity(&v, &u).unwrap();
        assert!((f1 - f2).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&f1));
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        assert!(avg_gate_fidelity(&identity(2), &identity(4)).is_err());
    }

    #[test]
    fn coherence_orders_of_ladder_operator() {
        let ip = spin_op(2, 1, Axis::Plus).unwrap();
        let comps = coherence_order_decomposition(&ip, Quantization::Z).unwrap();
        let nonzero: Vec<i32> = comps
            .iter()
            .filter(|(_, m)| m.norm() > 1e-14)
            .map(|(p, _)| *p)
            .collect();
        assert_eq!(nonzero, vec![1]);
    }

    #[test]
    fn coherence_orders_reassemble_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let a = Operator::from_fn(8, 8, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        for axis in [Quantization::Z, Quantization::X] {
            let comps = coherence_order_decomposition(&a, axis).unwrap();
            let mut sum = Operator::zeros(8, 8);
            for m in comps.values() {
                sum += m;
            }
            let dev = (&sum - &a).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "reassembly deviation {dev:.2e} for {axis:?}");
        }
    }

    #[test]
    fn coherence_component_rotation_phase() {
        // order-p component acquires e^{−ipφ} under exp(−iφ ΣI_z)
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let a = Operator::from_fn(4, 4, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let phi = 0.9;
        let u = expm_hermitian(&collective_op(2, Axis::Z), phi).unwrap();
        let rotated = &u * &a * u.adjoint();
        let before = coherence_order_decomposition(&a, Quantization::Z).unwrap();
        let after = coherence_order_decomposition(&rotated, Quantization::Z).unwrap();
        for (p, m) in &before {
            let want = m.map(|z| z * (-I * (*p as f64) * phi).exp());
            let got = &after[p];
            assert!((got - want).norm() < 1e-12, "order {p}");
        }
    }

    #[test]
    fn state_invariants() {
        assert!(State::new(identity(4) / c64(4.0, 0.0), StateKind::Mixed).is_ok());
        assert!(State::new(identity(4), StateKind::Mixed).is_err()); // trace 4
        let dev = spin_op(2, 1, Axis::Z).unwrap();
        assert!(State::new(dev, StateKind::Deviation).is_ok());
        // negative eigenvalue rejected for non-deviation
        let mut m = identity(2) / c64(2.0, 0.0);
        m[(0, 0)] = c64(1.5, 0.0);
        m[(1, 1)] = c64(-0.5, 0.0);
        assert!(State::new(m, StateKind::Mixed).is_err());
    }

    #[test]
    fn marginal_populations_pick_spins() {
        let s = State::basis_state(3, 0b101);
        assert_eq!(s.marginal_populations(&[1]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(s.marginal_populations(&[2]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(s.marginal_populations(&[1, 3]).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    }
}
