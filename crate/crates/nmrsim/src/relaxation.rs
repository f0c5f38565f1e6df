//! Non-unitary dynamics: phenomenological T1/T2 evolution and the
//! quantum-environment-plus-classical-kicks decoherence model.
//!
//! Relaxation is Trotterized: exact unitary steps exp(−iH·dt) alternate
//! with per-spin damping maps that scale single-spin coherences by
//! exp(−dt/T2) and pull populations toward a stored equilibrium at rate
//! 1/T1. Each step is the exact exponential of a valid qubit Lindbladian,
//! hence completely positive and trace preserving whenever T2 ≤ 2T1.
//!
//! The kick model couples one system spin to a small quantum environment
//! through weak (zz) couplings — all terms diagonal — and scrambles the
//! environment with random kicks: rotations of each environment spin about
//! a random transverse axis (random RF phase), by an angle drawn from the
//! configured distribution. Between kicks the joint state stays pure and
//! evolution is a diagonal phase multiplication. Kicks about ẑ commute
//! with the diagonal Hamiltonian and with the detection operator and have
//! provably no effect here, which is why the kick axis is transverse.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::operators::{c64, expm_hermitian, Operator, State};
use crate::{Error, Result};

/// Per-spin T1/T2 time constants and equilibrium populations.
///
/// `equilibrium_up` is the stationary population of the |0⟩ (spin-up)
/// level per spin; it defaults to ½ (maximally mixed equilibrium, the
/// high-temperature limit).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelaxationModel {
    pub t1_s: Vec<f64>,
    pub t2_s: Vec<f64>,
    pub equilibrium_up: Vec<f64>,
}

impl RelaxationModel {
    pub fn uniform(n_spins: usize, t1_s: f64, t2_s: f64) -> Result<Self> {
        let m = RelaxationModel {
            t1_s: vec![t1_s; n_spins],
            t2_s: vec![t2_s; n_spins],
            equilibrium_up: vec![0.5; n_spins],
        };
        m.validate()?;
        Ok(m)
    }

    pub fn n_spins(&self) -> usize {
        self.t1_s.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.t1_s.len() != self.t2_s.len() || self.t1_s.len() != self.equilibrium_up.len() {
            return Err(Error::InvalidArgument("relaxation vectors differ in length".into()));
        }
        for k in 0..self.t1_s.len() {
            let (t1, t2) = (self.t1_s[k], self.t2_s[k]);
            if !(t1 > 0.0) || !(t2 > 0.0) {
                return Err(Error::InvalidArgument("T1 and T2 must be positive".into()));
            }
            if t2 > 2.0 * t1 * (1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "spin {}: T2 = {t2} exceeds 2·T1 = {}",
                    k + 1,
                    2.0 * t1
                )));
            }
            if !(0.0..=1.0).contains(&self.equilibrium_up[k]) {
                return Err(Error::InvalidArgument("equilibrium population outside [0,1]".into()));
            }
        }
        Ok(())
    }
}

/// Apply the per-spin damping channel for a step `dt` in place.
fn damping_step(rho: &mut Operator, rm: &RelaxationModel, dt: f64) {
    let n = rm.n_spins();
    let dim = rho.nrows();
    for k in 0..n {
        let e1 = (-dt / rm.t1_s[k]).exp();
        let e2 = (-dt / rm.t2_s[k]).exp();
        let peq = rm.equilibrium_up[k];
        let bit = n - 1 - k; // spin k+1 occupies bit n−1−k
        let stride = 1usize << bit;
        for r in 0..dim {
            if (r >> bit) & 1 == 1 {
                continue;
            }
            for c in 0..dim {
                if (c >> bit) & 1 == 1 {
                    continue;
                }
                // 2×2 slice over spin k at block indices (r, c)
                let (r0, r1, c0, c1) = (r, r | stride, c, c | stride);
                let a = rho[(r0, c0)];
                let b = rho[(r0, c1)];
                let g = rho[(r1, c0)];
                let d = rho[(r1, c1)];
                let s = a + d;
                rho[(r0, c0)] = a * e1 + s * ((1.0 - e1) * peq);
                rho[(r1, c1)] = d * e1 + s * ((1.0 - e1) * (1.0 - peq));
                rho[(r0, c1)] = b * e2;
                rho[(r1, c0)] = g * e2;
            }
        }
    }
}

/// Trotterized relaxing evolution: alternate exp(−iH dt) with the per-spin
/// damping maps for ⌈t/dt⌉ steps (the last step is shortened to land on
/// `t` exactly).
pub fn evolve_with_relaxation(
    rho: &State,
    h: &Operator,
    rm: &RelaxationModel,
    t: f64,
    dt: f64,
) -> Result<State> {
    rm.validate()?;
    if rho.dim() != h.nrows() || rm.n_spins() != rho.n_spins()? {
        return Err(Error::DimensionMismatch("relaxation state/hamiltonian/model".into()));
    }
    if !(dt > 0.0) || dt > t {
        return Err(Error::InvalidArgument("need 0 < dt ≤ t".into()));
    }
    let hnorm = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tmin = rm
        .t1_s
        .iter()
        .chain(&rm.t2_s)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if dt > 0.1 * tmin || (hnorm > 0.0 && dt > 1.0 / hnorm) {
        eprintln!(
            "evolve_with_relaxation: dt = {dt:.3e} s is coarse against T1/T2 = {tmin:.3e} s or 1/‖H‖"
        );
    }
    let u = expm_hermitian(h, dt)?;
    let steps = (t / dt).floor() as usize;
    let mut m = rho.matrix.clone();
    for _ in 0..steps {
        m = &u * m * u.adjoint();
        damping_step(&mut m, rm, dt);
    }
    let rest = t - steps as f64 * dt;
    if rest > 1e-15 {
        let ur = expm_hermitian(h, rest)?;
        m = &ur * m * ur.adjoint();
        damping_step(&mut m, rm, rest);
    }
    State::new(m, crate::operators::StateKind::Mixed)
}

/// Dense Liouville-space generator for the same dynamics (column-major
/// vectorization): −i(1⊗H − Hᵀ⊗1) plus the T1/T2 dissipators. Oracle
/// partner of [`evolve_with_relaxation`] for small systems.
pub fn liouvillian(h: &Operator, rm: &RelaxationModel) -> Result<Operator> {
    rm.validate()?;
    let dim = h.nrows();
    let n = rm.n_spins();
    if dim != 1 << n {
        return Err(Error::DimensionMismatch("liouvillian model/hamiltonian".into()));
    }
    let d2 = dim * dim;
    let id = crate::operators::identity(dim);
    let mut l = Operator::zeros(d2, d2);
    // unitary part: vec(−i[H,ρ]) = −i(1⊗H − Hᵀ⊗1)vec(ρ) for column-major vec
    let minus_i = c64(0.0, -1.0);
    l += crate::operators::kron(&id, h).map(|z| z * minus_i);
    l -= crate::operators::kron(&h.transpose(), &id).map(|z| z * minus_i);
    // dissipators per spin: √(γ↓)·I−, √(γ↑)·I+, √(2γφ)·I_z
    for k in 0..n {
        let g1 = 1.0 / rm.t1_s[k];
        let g2 = 1.0 / rm.t2_s[k];
        let gphi = g2 - 0.5 * g1; // ≥ 0 by T2 ≤ 2T1
        let peq = rm.equilibrium_up[k];
        let sm = crate::operators::spin_op(n, k + 1, crate::operators::Axis::Minus)?;
        let sp = crate::operators::spin_op(n, k + 1, crate::operators::Axis::Plus)?;
        let sz = crate::operators::spin_op(n, k + 1, crate::operators::Axis::Z)?;
        for (op, rate) in [(&sm, g1 * peq), (&sp, g1 * (1.0 - peq)), (&sz, 2.0 * gphi)] {
            if rate == 0.0 {
                continue;
            }
            // D[L]ρ = LρL† − ½{L†L, ρ}, vectorized
            let lt = op.adjoint();
            let ltl = &lt * op;
            l += crate::operators::kron(&op.conjugate(), op).map(|z| z * rate);
            l -= crate::operators::kron(&id, &ltl).map(|z| z * (0.5 * rate));
            l -= crate::operators::kron(&ltl.transpose(), &id).map(|z| z * (0.5 * rate));
        }
    }
    Ok(l)
}

/// Kick-angle distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KickAngleDist {
    /// θ ~ N(0, σ²).
    SmallGaussian { sigma_rad: f64 },
    /// θ ~ U[0, 2π).
    Uniform0TwoPi,
}

/// Kick-time schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KickTiming {
    /// Kicks at (m+½)/rate — a uniform grid offset by half a period.
    Grid,
    /// Exponential waiting times at the stated rate.
    Poisson,
}

/// One system spin zz-coupled to `n_env` environment spins, scrambled by
/// random kicks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KickModel {
    pub n_env: usize,
    pub omega_sys_hz: f64,
    pub omega_env_hz: Vec<f64>,
    pub j_sys_env_hz: Vec<f64>,
    pub kick_rate_per_s: f64,
    pub kick_angle_dist: KickAngleDist,
    pub timing: KickTiming,
    pub seed: u64,
}

impl KickModel {
    pub fn validate(&self) -> Result<()> {
        if self.n_env < 1 {
            return Err(Error::InvalidArgument("kick model needs n_env ≥ 1".into()));
        }
        if self.n_env + 1 > 10 {
            return Err(Error::InvalidArgument(format!(
                "total dimension 2^{} exceeds the 1024 limit",
                self.n_env + 1
            )));
        }
        if self.omega_env_hz.len() != self.n_env || self.j_sys_env_hz.len() != self.n_env {
            return Err(Error::InvalidArgument(
                "omega_env_hz and j_sys_env_hz must have n_env entries".into(),
            ));
        }
        if self.kick_rate_per_s < 0.0 {
            return Err(Error::InvalidArgument("kick rate must be ≥ 0".into()));
        }
        Ok(())
    }

    /// Diagonal of the joint Hamiltonian (rad/s), indexed by basis state.
    fn diagonal(&self) -> Vec<f64> {
        let n_total = 1 + self.n_env;
        let dim = 1usize << n_total;
        let mut diag = vec![0.0; dim];
        for (idx, d) in diag.iter_mut().enumerate() {
            let s_sys = if (idx >> self.n_env) & 1 == 0 { 0.5 } else { -0.5 };
            *d += 2.0 * PI * self.omega_sys_hz * s_sys;
            for k in 0..self.n_env {
                let s_k = if (idx >> (self.n_env - 1 - k)) & 1 == 0 { 0.5 } else { -0.5 };
                *d += 2.0 * PI * self.omega_env_hz[k] * s_k;
                *d += 2.0 * PI * self.j_sys_env_hz[k] * s_sys * s_k;
            }
        }
        diag
    }
}

/// Output of [`kick_model_run`]: the sample times, one single-realization
/// trajectory (stream 0), and the average over all realizations.
#[derive(Debug, Clone)]
pub struct KickRunResult {
    pub times_s: Vec<f64>,
    pub single: Vec<Complex64>,
    pub averaged: Vec<Complex64>,
}

fn apply_env_kick(psi: &mut [Complex64], n_env: usize, k: usize, theta: f64, phase: f64) {
    // rotation exp(−iθ n·I) about n = (cos φ, sin φ, 0) on env spin k
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let u00 = c64(c, 0.0);
    let u01 = c64(-s * phase.sin(), -s * phase.cos());
    let u10 = c64(s * phase.sin(), -s * phase.cos());
    let u11 = c64(c, 0.0);
    let bit = n_env - 1 - k;
    let stride = 1usize << bit;
    for base in 0..psi.len() {
        if (base >> bit) & 1 == 1 {
            continue;
        }
        let a = psi[base];
        let b = psi[base | stride];
        psi[base] = u00 * a + u01 * b;
        psi[base | stride] = u10 * a + u11 * b;
    }
}

/// Evolve the pure joint state — system spin and every environment spin in
/// |+⟩ — under the diagonal Hamiltonian, applying a fresh random kick to
/// every environment spin at each kick time, and record ⟨I_+^1⟩ at the
/// sample times.
///
/// Realization `s` draws from ChaCha stream `s`, so every trajectory is
/// reproducible from (seed, sample index). Realizations run in parallel
/// and are averaged in fixed order.
pub fn kick_model_run(
    km: &KickModel,
    sample_times_s: &[f64],
    n_samples: usize,
) -> Result<KickRunResult> {
    km.validate()?;
    if n_samples == 0 || sample_times_s.is_empty() {
        return Err(Error::InvalidArgument("need samples and sample times".into()));
    }
    if sample_times_s.windows(2).any(|w| w[1] <= w[0]) || sample_times_s[0] < 0.0 {
        return Err(Error::InvalidArgument("sample times must increase".into()));
    }
    let diag = km.diagonal();
    let dim = diag.len();
    let n_env = km.n_env;
    let amp = c64(1.0 / (dim as f64).sqrt(), 0.0);

    let run_one = |stream: u64| -> Vec<Complex64> {
        let mut rng = ChaCha12Rng::seed_from_u64(km.seed);
        rng.set_stream(stream);
        let mut psi = vec![amp; dim];
        let mut t = 0.0;
        let kick_dt = if km.kick_rate_per_s > 0.0 {
            1.0 / km.kick_rate_per_s
        } else {
            f64::INFINITY
        };
        let mut next_kick = match km.timing {
            KickTiming::Grid => kick_dt / 2.0,
            KickTiming::Poisson => {
                if kick_dt.is_finite() {
                    -rng.random::<f64>().max(f64::MIN_POSITIVE).ln() * kick_dt
                } else {
                    f64::INFINITY
                }
            }
        };
        let phase_to = |psi: &mut Vec<Complex64>, from: f64, to: f64| {
            let dt = to - from;
            if dt == 0.0 {
                return;
            }
            for (p, d) in psi.iter_mut().zip(&diag) {
                *p *= (-crate::operators::I * *d * dt).exp();
            }
        };
        let mut out = Vec::with_capacity(sample_times_s.len());
        for &ts in sample_times_s {
            while next_kick <= ts {
                phase_to(&mut psi, t, next_kick);
                t = next_kick;
                for k in 0..n_env {
                    let theta = match km.kick_angle_dist {
                        KickAngleDist::SmallGaussian { sigma_rad } => {
                            // Box-Muller from two uniform draws
                            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                            let u2: f64 = rng.random();
                            sigma_rad * (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
                        }
                        KickAngleDist::Uniform0TwoPi => rng.random::<f64>() * 2.0 * PI,
                    };
                    let phase = rng.random::<f64>() * 2.0 * PI;
                    apply_env_kick(&mut psi, n_env, k, theta, phase);
                }
                next_kick += match km.timing {
                    KickTiming::Grid => kick_dt,
                    KickTiming::Poisson => {
                        -rng.random::<f64>().max(f64::MIN_POSITIVE).ln() * kick_dt
                    }
                };
            }
            phase_to(&mut psi, t, ts);
            t = ts;
            // ⟨I_+^1⟩ = Σ_e conj(ψ[1,e]) ψ[0,e]
            let half = dim / 2;
            let mut coh = Complex64::new(0.0, 0.0);
            for e in 0..half {
                coh += psi[half + e].conj() * psi[e];
            }
            out.push(coh);
        }
        out
    };

    let runs: Vec<Vec<Complex64>> = (0..n_samples as u64)
        .into_par_iter()
        .map(run_one)
        .collect();
    let mut averaged = vec![Complex64::new(0.0, 0.0); sample_times_s.len()];
    for run in &runs {
        for (a, v) in averaged.iter_mut().zip(run) {
            *a += v / c64(n_samples as f64, 0.0);
        }
    }
    Ok(KickRunResult {
        times_s: sample_times_s.to_vec(),
        single: runs[0].clone(),
        averaged,
    })
}

/// Exponential-decay fit of a time series.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate_per_s: f64,
    pub r_squared: f64,
    /// False when the series is degenerate (all zero, too few usable
    /// points) rather than merely a bad exponential.
    pub usable: bool,
}

/// Least-squares fit of log|signal| against t over the window where the
/// signal stays at or above 5% of its initial value. Returns the slope
/// magnitude and the fit quality; degenerate series come back flagged
/// rather than as errors.
pub fn fit_decay_rate(times_s: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times_s.len() != values.len() {
        return Err(Error::DimensionMismatch("fit series lengths".into()));
    }
    if times_s.len() < 8 {
        return Err(Error::InvalidArgument("decay fit needs at least 8 points".into()));
    }
    let v0 = values[0].abs();
    if v0 <= 0.0 {
        return Ok(DecayFit { rate_per_s: 0.0, r_squared: 0.0, usable: false });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times_s.iter().zip(values) {
        if v.abs() < 0.05 * v0 {
            break;
        }
        xs.push(t);
        ys.push((v.abs() / v0).ln());
    }
    if xs.len() < 2 {
        return Ok(DecayFit { rate_per_s: 0.0, r_squared: 0.0, usable: false });
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Ok(DecayFit { rate_per_s: 0.0, r_squared: 0.0, usable: false });
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        ss_res += (y - (slope * x + intercept)).powi(2);
        ss_tot += (y - mean).powi(2);
    }
    let r2 = if ss_tot > 1e-24 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(DecayFit { rate_per_s: -slope, r_squared: r2, usable: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{identity, spin_op, Axis, StateKind};
    use crate::spin_system::{CouplingModel, SpinSystem};

    fn plus_state() -> State {
        State::new(
            identity(2) * c64(0.5, 0.0) + spin_op(1, 1, Axis::X).unwrap(),
            StateKind::Pure,
        )
        .unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(RelaxationModel::uniform(1, 1.0, 0.5).is_ok());
        assert!(RelaxationModel::uniform(1, 1.0, 2.0).is_ok()); // T2 = 2T1 allowed
        assert!(RelaxationModel::uniform(1, 1.0, 2.5).is_err());
        assert!(RelaxationModel::uniform(1, -1.0, 0.5).is_err());
    }

    #[test]
    fn infinite_times_match_unitary_evolution() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![35.0, -20.0],
            vec![vec![0.0, 12.0], vec![12.0, 0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let h = sys.internal_hamiltonian();
        let rm = RelaxationModel::uniform(2, 1e12, 1e12).unwrap();
        let u0 = crate::control::rotation_propagator(
            &crate::control::RotationSpec::new([0.0, 1.0, 0.0], 1.1, 1),
            2,
        )
        .unwrap();
        let rho = State::basis_state(2, 1).evolve(&u0);
        let t = 8.0e-3;
        let relaxed = evolve_with_relaxation(&rho, &h, &rm, t, 1.0e-4).unwrap();
        let unitary = rho.evolve(&expm_hermitian(&h, t).unwrap());
        assert!((relaxed.matrix - unitary.matrix).norm() < 1e-9);
    }

    #[test]
    fn pure_dephasing_law() {
        let t2 = 0.08;
        let rm = RelaxationModel::uniform(1, 1e9, t2).unwrap();
        let h = Operator::zeros(2, 2);
        let ix = spin_op(1, 1, Axis::X).unwrap();
        for t in [0.01, 0.05, 0.12] {
            let out = evolve_with_relaxation(&plus_state(), &h, &rm, t, 1e-3).unwrap();
            let got = out.expect(&ix).re;
            let want = 0.5 * (-t / t2).exp();
            assert!((got - want).abs() < 1e-9, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn matches_dense_superoperator_for_diagonal_hamiltonian() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![24.0, -31.0],
            vec![vec![0.0, 17.0], vec![17.0, 0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let h = sys.internal_hamiltonian();
        let rm = RelaxationModel {
            t1_s: vec![0.5, 0.3],
            t2_s: vec![0.2, 0.15],
            equilibrium_up: vec![0.5, 0.5],
        };
        // a coherent pure state exercises the zz coherences
        let mut ket = nalgebra::DVector::from_element(4, c64(0.5, 0.0));
        ket[3] = c64(0.3, 0.4);
        let rho = State::from_ket(&ket);
        let t = 0.07;
        // dense 16×16 superoperator, column-major vec
        let l = liouvillian(&h, &rm).unwrap();
        let prop = crate::operators::expm_general(&l.map(|z| z * t));
        let mut vec_rho = nalgebra::DVector::zeros(16);
        for c in 0..4 {
            for r in 0..4 {
                vec_rho[c * 4 + r] = rho.matrix[(r, c)];
            }
        }
        let out = &prop * vec_rho;
        let mut exact = Operator::zeros(4, 4);
        for c in 0..4 {
            for r in 0..4 {
                exact[(r, c)] = out[c * 4 + r];
            }
        }
        let dev_coarse = (evolve_with_relaxation(&rho, &h, &rm, t, 4e-4).unwrap().matrix
            - &exact)
            .norm();
        let dev_fine = (evolve_with_relaxation(&rho, &h, &rm, t, 2e-5).unwrap().matrix - &exact)
            .norm();
        assert!(dev_fine < 1e-5, "fine-step deviation {dev_fine:.2e}");
        // first-order Trotter convergence toward the superoperator answer
        assert!(
            dev_fine < dev_coarse / 10.0,
            "no convergence: {dev_coarse:.2e} → {dev_fine:.2e}"
        );
    }

    #[test]
    fn matches_superoperator_for_transverse_hamiltonian_small_dt() {
        let h = spin_op(1, 1, Axis::X).unwrap() * c64(2.0 * PI * 40.0, 0.0);
        let rm = RelaxationModel::uniform(1, 0.25, 0.1).unwrap();
        let rho = State::basis_state(1, 0);
        let t = 0.02;
        let approx = evolve_with_relaxation(&rho, &h, &rm, t, 1e-5).unwrap();
        let l = liouvillian(&h, &rm).unwrap();
        let prop = crate::operators::expm_general(&l.map(|z| z * t));
        let mut v = nalgebra::DVector::zeros(4);
        v[0] = c64(1.0, 0.0);
        let out = &prop * v;
        let exact = Operator::from_column_slice(2, 2, out.as_slice());
        assert!((approx.matrix - exact).norm() < 1e-4);
    }

    #[test]
    fn purity_never_increases_without_hamiltonian() {
        let rm = RelaxationModel::uniform(1, 0.3, 0.2).unwrap();
        let h = Operator::zeros(2, 2);
        let mut rho = plus_state();
        let mut last = rho.purity();
        for _ in 0..5 {
            rho = evolve_with_relaxation(&rho, &h, &rm, 0.02, 1e-3).unwrap();
            let p = rho.purity();
            assert!(p <= last + 1e-12);
            last = p;
        }
    }

    #[test]
    fn zero_kick_recurrences() {
        let km = KickModel {
            n_env: 3,
            omega_sys_hz: 0.0,
            omega_env_hz: vec![0.0; 3],
            j_sys_env_hz: vec![50.0; 3],
            kick_rate_per_s: 0.0,
            kick_angle_dist: KickAngleDist::SmallGaussian { sigma_rad: 0.1 },
            timing: KickTiming::Grid,
            seed: 1,
        };
        // coherence ∝ Π cos(πJt): collapsed mid-period, revived at t = 1/J
        let times = [0.005, 0.01, 0.02];
        let out = kick_model_run(&km, &times, 2).unwrap();
        let c0 = 0.5;
        assert!(out.averaged[1].norm() < 0.05 * c0, "no collapse");
        assert!((out.averaged[2].norm() - c0).abs() < 1e-9, "recurrence lost");
        assert!((out.single[2].norm() - c0).abs() < 1e-9);
    }

    #[test]
    fn kicks_induce_decay_and_preserve_norm() {
        let km = KickModel {
            n_env: 2,
            omega_sys_hz: 0.0,
            omega_env_hz: vec![0.0; 2],
            j_sys_env_hz: vec![50.0; 2],
            kick_rate_per_s: 300.0,
            kick_angle_dist: KickAngleDist::SmallGaussian { sigma_rad: 0.4 },
            timing: KickTiming::Grid,
            seed: 3,
        };
        let times: Vec<f64> = (1..=10).map(|m| m as f64 * 0.02).collect();
        let out = kick_model_run(&km, &times, 32).unwrap();
        assert!(
            out.averaged[9].norm() < 0.35,
            "no decay: {}",
            out.averaged[9].norm()
        );
        assert!(out.averaged[0].norm() > out.averaged[9].norm());
        // single-realization coherence stays within the unit-norm bound
        assert!(out.single.iter().all(|z| z.norm() <= 0.5 + 1e-12));
    }

    #[test]
    fn kick_run_is_deterministic() {
        let km = KickModel {
            n_env: 1,
            omega_sys_hz: 11.0,
            omega_env_hz: vec![5.0],
            j_sys_env_hz: vec![40.0],
            kick_rate_per_s: 150.0,
            kick_angle_dist: KickAngleDist::Uniform0TwoPi,
            timing: KickTiming::Poisson,
            seed: 9,
        };
        let times = [0.01, 0.02, 0.03];
        let a = kick_model_run(&km, &times, 8).unwrap();
        let b = kick_model_run(&km, &times, 8).unwrap();
        for (x, y) in a.averaged.iter().zip(&b.averaged) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn fit_exact_exponential() {
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.02).collect();
        let vals: Vec<f64> = times.iter().map(|t| (-3.0 * t).exp()).collect();
        let fit = fit_decay_rate(&times, &vals).unwrap();
        assert!(fit.usable);
        assert!((fit.rate_per_s - 3.0).abs() < 1e-6, "rate {}", fit.rate_per_s);
        assert!(fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn fit_constant_and_degenerate_series() {
        let times: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let consts = vec![2.0; 10];
        let fit = fit_decay_rate(&times, &consts).unwrap();
        assert!(fit.usable);
        assert!(fit.rate_per_s.abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-9); // perfect fit to a constant

        let zeros = vec![0.0; 10];
        let fit0 = fit_decay_rate(&times, &zeros).unwrap();
        assert!(!fit0.usable);
        assert!(fit_decay_rate(&times[..4], &consts[..4]).is_err());
    }
}
