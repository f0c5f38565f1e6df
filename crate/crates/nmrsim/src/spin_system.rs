//! Molecules and crystals as spin systems: internal Hamiltonians and thermal
//! states.
//!
//! A [`SpinSystem`] holds rotating-frame resonance offsets ν_k (Hz), the
//! symmetric scalar-coupling matrix J_kj (Hz), and optionally a dipolar
//! coupling matrix d_ij (Hz). Three coupling models are supported:
//!
//! * `full_j`   — H = Σ_k 2πν_k I_z^k + Σ_{j>k} 2πJ_kj I^k·I^j
//! * `weak_j`   — the flip-flop part dropped, 2πJ I_z I_z only
//! * `dipolar_truncated` — ω ΣI_z + Σ_{i<j} 2πd_ij (3 I_z^i I_z^j − I^i·I^j)
//!
//! Chemical shifts are stored pre-subtracted as rotating-frame offsets;
//! absolute Larmor frequencies live only in [`ThermalParams`], which feeds
//! the Boltzmann thermal state (exact or high-temperature expansion).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::operators::{
    c64, identity, kron, single_spin, spin_op, Axis, Operator, State, StateKind,
};
use crate::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingModel {
    FullJ,
    WeakJ,
    DipolarTruncated,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpinEntry {
    label: String,
    offset_hz: f64,
}

/// N spin-1/2 nuclei with offsets and couplings.
///
/// Serializes to/from the JSON schema
/// `{"spins":[{"label","offset_hz"},...],"j_hz":[[...]],"d_hz":[[...]],"model":"weak_j"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpinSystemRepr", into = "SpinSystemRepr")]
pub struct SpinSystem {
    labels: Vec<String>,
    offsets_hz: Vec<f64>,
    j_hz: Vec<Vec<f64>>,
    d_hz: Option<Vec<Vec<f64>>>,
    model: CouplingModel,
}

#[derive(Serialize, Deserialize)]
struct SpinSystemRepr {
    spins: Vec<SpinEntry>,
    j_hz: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_hz: Option<Vec<Vec<f64>>>,
    model: CouplingModel,
}

impl TryFrom<SpinSystemRepr> for SpinSystem {
    type Error = Error;
    fn try_from(r: SpinSystemRepr) -> Result<Self> {
        SpinSystem::new(
            r.spins.iter().map(|s| s.label.clone()).collect(),
            r.spins.iter().map(|s| s.offset_hz).collect(),
            r.j_hz,
            r.d_hz,
            r.model,
        )
    }
}

impl From<SpinSystem> for SpinSystemRepr {
    fn from(s: SpinSystem) -> Self {
        SpinSystemRepr {
            spins: s
                .labels
                .iter()
                .zip(&s.offsets_hz)
                .map(|(l, &o)| SpinEntry { label: l.clone(), offset_hz: o })
                .collect(),
            j_hz: s.j_hz,
            d_hz: s.d_hz,
            model: s.model,
        }
    }
}

fn check_coupling_matrix(name: &str, m: &[Vec<f64>], n: usize) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidSystem(format!("{name} must be {n}×{n}")));
    }
    for i in 0..n {
        if m[i][i] != 0.0 {
            return Err(Error::InvalidSystem(format!("{name} diagonal must be zero")));
        }
        for j in 0..n {
            if (m[i][j] - m[j][i]).abs() > 1e-12 {
                return Err(Error::InvalidSystem(format!("{name} must be symmetric")));
            }
        }
    }
    Ok(())
}

impl SpinSystem {
    pub fn new(
        labels: Vec<String>,
        offsets_hz: Vec<f64>,
        j_hz: Vec<Vec<f64>>,
        d_hz: Option<Vec<Vec<f64>>>,
        model: CouplingModel,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n != offsets_hz.len() {
            return Err(Error::InvalidSystem(
                "labels and offsets must be non-empty and of equal length".into(),
            ));
        }
        if n > 10 {
            return Err(Error::InvalidSystem(format!(
                "{n} spins exceeds the dense-matrix limit of 10"
            )));
        }
        check_coupling_matrix("j_hz", &j_hz, n)?;
        if let Some(d) = &d_hz {
            check_coupling_matrix("d_hz", d, n)?;
        }
        if model == CouplingModel::DipolarTruncated {
            if d_hz.is_none() {
                return Err(Error::InvalidSystem(
                    "dipolar_truncated model requires d_hz".into(),
                ));
            }
            if offsets_hz.iter().any(|&o| (o - offsets_hz[0]).abs() > 1e-12) {
                return Err(Error::InvalidSystem(
                    "dipolar_truncated uses a single shared offset".into(),
                ));
            }
        }
        Ok(SpinSystem { labels, offsets_hz, j_hz, d_hz, model })
    }

    /// Uncoupled helper: equal offsets, zero J.
    pub fn uncoupled(n: usize, offset_hz: f64) -> Self {
        SpinSystem::new(
            (1..=n).map(|k| format!("S{k}")).collect(),
            vec![offset_hz; n],
            vec![vec![0.0; n]; n],
            None,
            CouplingModel::WeakJ,
        )
        .expect("valid by construction")
    }

    pub fn n_spins(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn offsets_hz(&self) -> &[f64] {
        &self.offsets_hz
    }

    pub fn j_hz(&self, k: usize, j: usize) -> f64 {
        self.j_hz[k - 1][j - 1]
    }

    pub fn model(&self) -> CouplingModel {
        self.model
    }

    /// Copy with every offset shifted by `delta_hz` (static-field ensemble
    /// member).
    pub fn with_offset_shift(&self, delta_hz: f64) -> Self {
        let mut s = self.clone();
        for o in &mut s.offsets_hz {
            *o += delta_hz;
        }
        s
    }

    /// Copy with one offset replaced.
    pub fn with_offset(&self, spin: usize, offset_hz: f64) -> Self {
        let mut s = self.clone();
        s.offsets_hz[spin - 1] = offset_hz;
        s
    }

    /// Zeeman part Σ_k 2πν_k I_z^k (rad/s).
    pub fn zeeman_hamiltonian(&self) -> Operator {
        let n = self.n_spins();
        let mut h = Operator::zeros(self.dim(), self.dim());
        for k in 1..=n {
            let nu = self.offsets_hz[k - 1];
            if nu != 0.0 {
                h += spin_op(n, k, Axis::Z).expect("in range") * c64(2.0 * PI * nu, 0.0);
            }
        }
        h
    }

    /// Coupling part of the internal Hamiltonian (rad/s), per the model.
    pub fn coupling_hamiltonian(&self) -> Operator {
        let n = self.n_spins();
        let dim = self.dim();
        let mut h = Operator::zeros(dim, dim);
        match self.model {
            CouplingModel::FullJ | CouplingModel::WeakJ => {
                for k in 1..n {
                    for j in (k + 1)..=n {
                        let jc = self.j_hz[k - 1][j - 1];
                        if jc == 0.0 {
                            continue;
                        }
                        let zz = spin_op(n, k, Axis::Z).unwrap() * spin_op(n, j, Axis::Z).unwrap();
                        if self.model == CouplingModel::WeakJ {
                            h += zz * c64(2.0 * PI * jc, 0.0);
                        } else {
                            let xx = spin_op(n, k, Axis::X).unwrap() * spin_op(n, j, Axis::X).unwrap();
                            let yy = spin_op(n, k, Axis::Y).unwrap() * spin_op(n, j, Axis::Y).unwrap();
                            h += (zz + xx + yy) * c64(2.0 * PI * jc, 0.0);
                        }
                    }
                }
            }
            CouplingModel::DipolarTruncated => {
                h = self.dipolar_coupling_term().expect("d_hz checked at construction");
            }
        }
        h
    }

    /// Truncated dipolar coupling Σ_{i<j} 2πd_ij (3 I_z^i I_z^j − I^i·I^j)
    /// in rad/s, independent of the Zeeman part.
    pub fn dipolar_coupling_term(&self) -> Result<Operator> {
        let d = self
            .d_hz
            .as_ref()
            .ok_or_else(|| Error::InvalidSystem("d_hz not present".into()))?;
        let n = self.n_spins();
        let dim = self.dim();
        let mut h = Operator::zeros(dim, dim);
        for i in 1..n {
            for j in (i + 1)..=n {
                let dc = d[i - 1][j - 1];
                if dc == 0.0 {
                    continue;
                }
                let zz = spin_op(n, i, Axis::Z).unwrap() * spin_op(n, j, Axis::Z).unwrap();
                let xx = spin_op(n, i, Axis::X).unwrap() * spin_op(n, j, Axis::X).unwrap();
                let yy = spin_op(n, i, Axis::Y).unwrap() * spin_op(n, j, Axis::Y).unwrap();
                h += (zz.map(|z| z * 3.0) - (xx + yy + zz)) * c64(2.0 * PI * dc, 0.0);
            }
        }
        Ok(h)
    }

    /// Full internal Hamiltonian (rad/s).
    pub fn internal_hamiltonian(&self) -> Operator {
        self.zeeman_hamiltonian() + self.coupling_hamiltonian()
    }

    /// The truncated dipolar coupling written in x-basis ladder operators
    /// (I_x± = I_y ± i·I_z):
    ///
    /// −½ Σ d_ij {2 I_x I_x − ½(I_x+ I_x− + I_x− I_x+)}
    /// − ¾ Σ d_ij (I_x+ I_x+ + I_x− I_x−)
    ///
    /// Algebraically this equals [`Self::dipolar_coupling_term`]; the two
    /// builders are independent routes and are tested against each other.
    /// Examined along x-quantization the operator carries zero- and
    /// double-quantum components only.
    pub fn x_basis_dipolar(&self) -> Result<Operator> {
        let d = self
            .d_hz
            .as_ref()
            .ok_or_else(|| Error::InvalidSystem("d_hz not present".into()))?;
        let n = self.n_spins();
        let dim = self.dim();
        // x-basis ladder on one spin: I_x± = I_y ± i I_z
        let xp = single_spin(Axis::Y) + single_spin(Axis::Z).map(|z| z * crate::operators::I);
        let xm = single_spin(Axis::Y) - single_spin(Axis::Z).map(|z| z * crate::operators::I);
        let embed = |op: &Operator, k: usize| -> Operator {
            let mut out = if k == 1 { op.clone() } else { identity(2) };
            for j in 2..=n {
                let f = if j == k { op.clone() } else { identity(2) };
                out = kron(&out, &f);
            }
            out
        };
        let mut h = Operator::zeros(dim, dim);
        for i in 1..n {
            for j in (i + 1)..=n {
                let dc = d[i - 1][j - 1];
                if dc == 0.0 {
                    continue;
                }
                let w = c64(2.0 * PI * dc, 0.0);
                let xx = spin_op(n, i, Axis::X).unwrap() * spin_op(n, j, Axis::X).unwrap();
                let flip = embed(&xp, i) * embed(&xm, j) + embed(&xm, i) * embed(&xp, j);
                let dq = embed(&xp, i) * embed(&xp, j) + embed(&xm, i) * embed(&xm, j);
                h += (xx.map(|z| z * 2.0) - flip.map(|z| z * 0.5)) * w * c64(-0.5, 0.0)
                    + dq * w * c64(-0.75, 0.0);
            }
        }
        Ok(h)
    }
}

/// Static field, temperature, and per-spin gyromagnetic ratios (as Larmor
/// Hz per tesla) for thermal-state construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermalParams {
    pub b0_tesla: f64,
    pub temperature_k: f64,
    pub gamma_hz_per_tesla: Vec<f64>,
}

impl ThermalParams {
    pub fn new(b0_tesla: f64, temperature_k: f64, gamma_hz_per_tesla: Vec<f64>) -> Result<Self> {
        if b0_tesla <= 0.0 || temperature_k <= 0.0 {
            return Err(Error::InvalidArgument(
                "field and temperature must be positive".into(),
            ));
        }
        Ok(ThermalParams { b0_tesla, temperature_k, gamma_hz_per_tesla })
    }

    /// ħω_k/(2 k_B T) for spin k (1-based): the high-temperature single-spin
    /// polarization.
    pub fn polarization(&self, k: usize) -> f64 {
        let omega = 2.0 * PI * self.gamma_hz_per_tesla[k - 1] * self.b0_tesla;
        HBAR * omega / (2.0 * KB * self.temperature_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalMode {
    Exact,
    HighTemperature,
}

/// Boltzmann equilibrium state of the lab-frame Zeeman Hamiltonian.
///
/// `Exact` evaluates exp(−H_lab/k_B T)/Z spin by spin (the Zeeman terms
/// commute, couplings are negligible at this scale); `HighTemperature`
/// returns the first-order expansion 1/2^N + Σ_k ħω_k/(2^N·2k_B T)·I_z^k.
pub fn thermal_state(sys: &SpinSystem, tp: &ThermalParams, mode: ThermalMode) -> Result<State> {
    let n = sys.n_spins();
    if tp.gamma_hz_per_tesla.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} gyromagnetic ratios for {} spins",
            tp.gamma_hz_per_tesla.len(),
            n
        )));
    }
    let dim = sys.dim();
    match mode {
        ThermalMode::HighTemperature => {
            let mut m = identity(dim) / c64(dim as f64, 0.0);
            for k in 1..=n {
                let pol = tp.polarization(k);
                m += spin_op(n, k, Axis::Z)? * c64(2.0 * pol / dim as f64, 0.0);
            }
            State::new(m, StateKind::Mixed)
        }
        ThermalMode::Exact => {
            // product of single-spin Boltzmann factors diag(e^{x/2}, e^{−x/2})/2cosh(x/2)
            let mut m = DMatrix::from_element(1, 1, c64(1.0, 0.0));
            for k in 1..=n {
                let x = 2.0 * tp.polarization(k); // ħω/(k_B T)
                let z = 2.0 * (x / 2.0).cosh();
                let f = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    c64((x / 2.0).exp() / z, 0.0),
                    c64((-x / 2.0).exp() / z, 0.0),
                ]));
                m = kron(&m, &f);
            }
            State::new(m, StateKind::Mixed)
        }
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use super::*;
    use crate::operators::{collective_op, commutator, eigh, Quantization};

    fn two_spin(j: f64, nu1: f64, nu2: f64, model: CouplingModel) -> SpinSystem {
        SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![nu1, nu2],
            vec![vec![0.0, j], vec![j, 0.0]],
            None,
            model,
        )
        .unwrap()
    }

    fn dipolar_pair(d: f64) -> SpinSystem {
        SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            Some(vec![vec![0.0, d], vec![d, 0.0]]),
            CouplingModel::DipolarTruncated,
        )
        .unwrap()
    }

    #[test]
    fn invalid_systems_rejected() {
        assert!(SpinSystem::new(
            vec!["A".into()],
            vec![0.0],
            vec![vec![1.0]], // nonzero diagonal
            None,
            CouplingModel::WeakJ,
        )
        .is_err());
        assert!(SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            vec![vec![0.0, 1.0], vec![2.0, 0.0]], // asymmetric
            None,
            CouplingModel::WeakJ,
        )
        .is_err());
        assert!(SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            None,
            CouplingModel::DipolarTruncated, // missing d_hz
        )
        .is_err());
    }

    #[test]
    fn single_spin_zeeman() {
        let sys = SpinSystem::new(
            vec!["H".into()],
            vec![100.0],
            vec![vec![0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let h = sys.internal_hamiltonian();
        assert!((h[(0, 0)].re - PI * 100.0).abs() < 1e-9);
        assert!((h[(1, 1)].re + PI * 100.0).abs() < 1e-9);
    }

    #[test]
    fn weak_coupling_eigenvalues() {
        let sys = two_spin(10.0, 0.0, 0.0, CouplingModel::WeakJ);
        let (vals, _) = eigh(&sys.internal_hamiltonian()).unwrap();
        let mut v: Vec<f64> = vals.iter().cloned().collect();
        v.sort_by(f64::total_cmp);
        let expect = [-5.0 * PI, -5.0 * PI, 5.0 * PI, 5.0 * PI];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn full_j_approaches_weak_j_for_large_shift_difference() {
        let j = 10.0;
        let full = two_spin(j, 0.0, 1000.0 * j, CouplingModel::FullJ);
        let weak = two_spin(j, 0.0, 1000.0 * j, CouplingModel::WeakJ);
        let (ef, _) = eigh(&full.internal_hamiltonian()).unwrap();
        let (ew, _) = eigh(&weak.internal_hamiltonian()).unwrap();
        let mut ef: Vec<f64> = ef.iter().cloned().collect();
        let mut ew: Vec<f64> = ew.iter().cloned().collect();
        ef.sort_by(f64::total_cmp);
        ew.sort_by(f64::total_cmp);
        let scale = ef.iter().map(|e| e.abs()).fold(0.0, f64::max);
        for (a, b) in ef.iter().zip(&ew) {
            assert!((a - b).abs() / scale < 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn truncated_forms_conserve_zeeman_order() {
        let weak = two_spin(25.0, 50.0, -30.0, CouplingModel::WeakJ);
        let iz = collective_op(2, Axis::Z);
        assert!(commutator(&weak.internal_hamiltonian(), &iz).norm() < 1e-12);

        let dip = dipolar_pair(40.0);
        let hdd = dip.dipolar_coupling_term().unwrap();
        assert!(commutator(&hdd, &iz).norm() < 1e-12);
        // a single spin's Zeeman term does not commute with the coupling
        let iz1 = spin_op(2, 1, Axis::Z).unwrap();
        assert!(commutator(&iz1, &hdd).norm() > 1e-3);
    }

    #[test]
    fn x_basis_dipolar_equals_z_form_construction() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![0.0, 0.0, 0.0],
            vec![vec![0.0; 3]; 3],
            Some(vec![
                vec![0.0, 30.0, 7.0],
                vec![30.0, 0.0, 18.0],
                vec![7.0, 18.0, 0.0],
            ]),
            CouplingModel::DipolarTruncated,
        )
        .unwrap();
        let a = sys.dipolar_coupling_term().unwrap();
        let b = sys.x_basis_dipolar().unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn x_basis_dipolar_zero_couplings() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            Some(vec![vec![0.0, 0.0], vec![0.0, 0.0]]),
            CouplingModel::DipolarTruncated,
        )
        .unwrap();
        assert!(sys.x_basis_dipolar().unwrap().norm() < 1e-15);
    }

    #[test]
    fn dipolar_coherence_order_structure() {
        let sys = dipolar_pair(55.0);
        let hdd = sys.dipolar_coupling_term().unwrap();
        let z_orders = crate::operators::coherence_order_intensities(&hdd, Quantization::Z).unwrap();
        for (p, w) in &z_orders {
            if *p != 0 {
                assert!(*w < 1e-12, "z-order {p} weight {w:.2e}");
            }
        }
        let x_orders = crate::operators::coherence_order_intensities(&hdd, Quantization::X).unwrap();
        for (p, w) in &x_orders {
            if ![0, 2, -2].contains(p) {
                assert!(*w < 1e-12, "x-order {p} weight {w:.2e}");
            }
        }
        assert!(x_orders[&2] > 1e-3 && x_orders[&-2] > 1e-3);
    }

    #[test]
    fn x_basis_double_quantum_coefficient() {
        // coefficient of I_x+^1 I_x+^2 is −(3/4)·2π·d
        let d = 40.0;
        let sys = dipolar_pair(d);
        let h = sys.x_basis_dipolar().unwrap();
        let xp = single_spin(Axis::Y) + single_spin(Axis::Z).map(|z| z * crate::operators::I);
        let dq = kron(&xp, &xp);
        // project: ⟨A, H⟩ / ⟨A, A⟩ with the Frobenius inner product
        let num: Complex64 = (dq.adjoint() * &h).diagonal().sum();
        let den: Complex64 = (dq.adjoint() * &dq).diagonal().sum();
        let coef = num / den;
        let want = -0.75 * 2.0 * PI * d;
        assert!((coef.re - want).abs() < 1e-9 && coef.im.abs() < 1e-9, "coef {coef}");
    }

    #[test]
    fn thermal_infinite_temperature_limit() {
        let sys = two_spin(10.0, 0.0, 0.0, CouplingModel::WeakJ);
        let tp = ThermalParams::new(11.74, 1e12, vec![42.577e6, 10.708e6]).unwrap();
        let rho = thermal_state(&sys, &tp, ThermalMode::Exact).unwrap();
        let mm = State::maximally_mixed(2);
        assert!((rho.matrix - mm.matrix).norm() < 1e-9);
    }

    #[test]
    fn proton_polarization_at_500_mhz() {
        let tp = ThermalParams::new(11.74, 300.0, vec![42.577_478e6]).unwrap();
        let pol = tp.polarization(1);
        // ħω/(2 k_B T) with ω/2π ≈ 500 MHz — order 1e-4, value ≈ 4.0e-5
        assert!((pol - 4.0e-5).abs() < 2e-6, "polarization {pol:.3e}");
    }

    #[test]
    fn exact_matches_high_temperature_at_room_temperature() {
        let sys = two_spin(7.0, 0.0, 0.0, CouplingModel::WeakJ);
        let tp = ThermalParams::new(11.74, 300.0, vec![42.577e6, 10.708e6]).unwrap();
        let exact = thermal_state(&sys, &tp, ThermalMode::Exact).unwrap();
        let ht = thermal_state(&sys, &tp, ThermalMode::HighTemperature).unwrap();
        for (a, b) in exact.populations().iter().zip(ht.populations()) {
            assert!((a - b).abs() / a < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn thermal_populations_decrease_with_zeeman_energy() {
        // both spins polarized: population order 00 > 01, 10 > 11
        let sys = two_spin(0.0, 0.0, 0.0, CouplingModel::WeakJ);
        let tp = ThermalParams::new(11.74, 300.0, vec![42.577e6, 10.708e6]).unwrap();
        let rho = thermal_state(&sys, &tp, ThermalMode::Exact).unwrap();
        let p = rho.populations();
        assert!(p[0] > p[1] && p[0] > p[2] && p[1] > p[3] && p[2] > p[3]);
    }

    #[test]
    fn json_round_trip() {
        let sys = two_spin(215.0, 0.0, 120.0, CouplingModel::WeakJ);
        let s = serde_json::to_string(&sys).unwrap();
        assert!(s.contains("\"model\":\"weak_j\""));
        let back: SpinSystem = serde_json::from_str(&s).unwrap();
        assert_eq!(back.n_spins(), 2);
        assert_eq!(back.j_hz(1, 2), 215.0);
        // schema-level check
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["spins"][0]["label"].is_string());
        assert!(v["spins"][0]["offset_hz"].is_number());
    }
}
