//! RF control: ideal and faulty rotations, composite pulses, shaped and
//! strongly modulating pulses, and average-Hamiltonian (toggling-frame)
//! bookkeeping.
//!
//! A faulty rotation carries a systematic amplitude error ε and implements
//! exp[−i(1+ε)θ n·I]. The BB1 composite sequence replaces a single
//! rotation R_x(θ) by R_φ(π)·R_3φ(2π)·R_φ(π)·R_x(θ) (rightmost first) with
//! φ = arccos(−θ/4π), suppressing the error to O(ε³) in the propagator.
//!
//! Finite-power control is described by [`PulseSegment`]s; the segment
//! propagator evolves under H_int + H_rf with the transmitter offset folded
//! in as −2πΔ I_z during the segment (piecewise-constant frame convention).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::operators::{
    avg_gate_fidelity, c64, expm_hermitian, identity, spin_op, Axis, Operator,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::sequence::{EnsembleSpec, Event, Pulse, PulseProgram};
use crate::spin_system::SpinSystem;
use crate::{Error, Result};

/// Which spins an RF segment drives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    All,
    /// 1-based spin indices.
    Spins(Vec<usize>),
}

impl Target {
    pub fn includes(&self, spin: usize) -> bool {
        match self {
            Target::All => true,
            Target::Spins(v) => v.contains(&spin),
        }
    }
}

/// One piecewise-constant RF segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseSegment {
    /// Nutation frequency ω₁/2π in Hz.
    pub amplitude_hz: f64,
    /// RF phase φ: the drive is 2π·amplitude·(cos φ I_x + sin φ I_y).
    pub phase_rad: f64,
    /// Carrier offset Δ from the rotating-frame reference (Hz).
    pub transmitter_offset_hz: f64,
    pub duration_s: f64,
    pub target: Target,
}

impl PulseSegment {
    pub fn validate(&self) -> Result<()> {
        if self.amplitude_hz < 0.0 {
            return Err(Error::InvalidArgument("segment amplitude must be ≥ 0".into()));
        }
        if self.duration_s <= 0.0 {
            return Err(Error::InvalidArgument("segment duration must be > 0".into()));
        }
        Ok(())
    }
}

/// A single-spin rotation by `angle_rad` about `axis`, with an optional
/// systematic amplitude error ε.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationSpec {
    /// Unit 3-vector.
    pub axis: [f64; 3],
    pub angle_rad: f64,
    /// Target spin, 1-based.
    pub spin: usize,
    /// ε in exp[−i(1+ε)θ n·I]; zero for an ideal rotation.
    pub amplitude_error: f64,
}

impl RotationSpec {
    pub fn new(axis: [f64; 3], angle_rad: f64, spin: usize) -> Self {
        RotationSpec { axis, angle_rad, spin, amplitude_error: 0.0 }
    }

    /// Rotation about an axis in the transverse plane at phase φ.
    pub fn transverse(phase_rad: f64, angle_rad: f64, spin: usize) -> Self {
        Self::new([phase_rad.cos(), phase_rad.sin(), 0.0], angle_rad, spin)
    }

    pub fn with_error(mut self, eps: f64) -> Self {
        self.amplitude_error = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = (self.axis[0].powi(2) + self.axis[1].powi(2) + self.axis[2].powi(2)).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("rotation axis norm {n} ≠ 1")));
        }
        Ok(())
    }
}

/// Ordered list of rotations; rightmost-written entries of composite-pulse
/// formulas are stored first (application order).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositeSequence(pub Vec<RotationSpec>);

impl CompositeSequence {
    pub fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::InvalidArgument("composite sequence is empty".into()));
        }
        for r in &self.0 {
            r.validate()?;
        }
        Ok(())
    }

    /// Product of the propagators, first entry applied first.
    pub fn propagator(&self, n_spins: usize) -> Result<Operator> {
        let dim = 1 << n_spins;
        let mut u = identity(dim);
        for r in &self.0 {
            u = rotation_propagator(r, n_spins)? * u;
        }
        Ok(u)
    }

    /// Same sequence with every rotation sharing one amplitude error.
    pub fn with_error(&self, eps: f64) -> CompositeSequence {
        CompositeSequence(self.0.iter().map(|r| r.clone().with_error(eps)).collect())
    }
}

/// exp[−i(1+ε)θ n·I] on the target spin.
pub fn rotation_propagator(r: &RotationSpec, n_spins: usize) -> Result<Operator> {
    r.validate()?;
    let generator = spin_op(n_spins, r.spin, Axis::X)? * c64(r.axis[0], 0.0)
        + spin_op(n_spins, r.spin, Axis::Y)? * c64(r.axis[1], 0.0)
        + spin_op(n_spins, r.spin, Axis::Z)? * c64(r.axis[2], 0.0);
    expm_hermitian(&generator, (1.0 + r.amplitude_error) * r.angle_rad)
}

/// The BB1 composite rotation for a target angle θ about x̂:
/// apply R_x(θ), then R_φ(π), R_3φ(2π), R_φ(π), with φ = arccos(−θ/4π).
pub fn bb1(theta_rad: f64) -> Result<CompositeSequence> {
    bb1_on(theta_rad, 1)
}

/// BB1 addressed to a specific spin.
pub fn bb1_on(theta_rad: f64, spin: usize) -> Result<CompositeSequence> {
    if !(theta_rad > 0.0 && theta_rad <= 2.0 * PI) {
        return Err(Error::InvalidArgument(format!(
            "BB1 angle {theta_rad} outside (0, 2π]"
        )));
    }
    let phi = (-theta_rad / (4.0 * PI)).acos();
    Ok(CompositeSequence(vec![
        RotationSpec::transverse(0.0, theta_rad, spin),
        RotationSpec::transverse(phi, PI, spin),
        RotationSpec::transverse(3.0 * phi, 2.0 * PI, spin),
        RotationSpec::transverse(phi, PI, spin),
    ]))
}

/// Propagator of one RF segment: exp[−i(H_int + H_rf)·duration] with
/// H_rf = Σ_targeted 2π·A (cos φ I_x^k + sin φ I_y^k) − 2π·Δ I_z^k.
pub fn segment_propagator(seg: &PulseSegment, sys: &SpinSystem) -> Result<Operator> {
    seg.validate()?;
    let n = sys.n_spins();
    let mut h = sys.internal_hamiltonian();
    for k in 1..=n {
        if !seg.target.includes(k) {
            continue;
        }
        let amp = 2.0 * PI * seg.amplitude_hz;
        h += spin_op(n, k, Axis::X)? * c64(amp * seg.phase_rad.cos(), 0.0)
            + spin_op(n, k, Axis::Y)? * c64(amp * seg.phase_rad.sin(), 0.0)
            - spin_op(n, k, Axis::Z)? * c64(2.0 * PI * seg.transmitter_offset_hz, 0.0);
    }
    expm_hermitian(&h, seg.duration_s)
}

/// Toggling-frame expansion of a cyclic pulse train.
#[derive(Debug, Clone)]
pub struct TogglingFrame {
    /// H_k = U_k† H U_k with U_k the product of the first k pulses.
    pub toggled: Vec<Operator>,
    /// Zeroth-order average Hamiltonian (1/M) Σ H_k.
    pub average: Operator,
    /// Π_k exp(−i H_k Δt), k descending — the exact propagator of the
    /// interleaved delay/pulse sequence up to the (trivial) cycle phase.
    pub total: Operator,
}

/// Expand a cyclic train of instantaneous pulses equally spaced by
/// `delta_t_s` over `h_int`.
///
/// The physical sequence is `[Δt, P₁, Δt, P₂, …, Δt, P_M]`; cyclicity
/// (Π P_j = 1 up to a global phase) is checked to 1e-8.
pub fn toggling_frame(
    h_int: &Operator,
    pulses: &CompositeSequence,
    delta_t_s: f64,
) -> Result<TogglingFrame> {
    pulses.validate()?;
    let dim = h_int.nrows();
    let n_spins = crate::operators::n_spins_of_dim(dim)?;
    if delta_t_s <= 0.0 {
        return Err(Error::InvalidArgument("pulse spacing must be > 0".into()));
    }
    // cyclicity: the full product must be a phase times the identity
    let full = pulses.propagator(n_spins)?;
    let phase = full[(0, 0)] / c64(full[(0, 0)].norm(), 0.0);
    if (full.clone() / phase - identity(dim)).norm() > 1e-8 {
        return Err(Error::InvalidProgram(
            "pulse train is not cyclic (product ≠ identity up to phase)".into(),
        ));
    }

    let m = pulses.0.len();
    let mut u_k = identity(dim);
    let mut toggled = Vec::with_capacity(m);
    // H_0 = H (before the first pulse), then conjugate by the accumulated
    // pulse product
    for j in 0..m {
        toggled.push(u_k.adjoint() * h_int * &u_k);
        u_k = rotation_propagator(&pulses.0[j], n_spins)? * u_k;
        let _ = j;
    }
    let mut average = Operator::zeros(dim, dim);
    for h in &toggled {
        average += h;
    }
    average /= c64(m as f64, 0.0);

    let mut total = identity(dim);
    for h in &toggled {
        total = expm_hermitian(h, delta_t_s)? * total;
    }
    Ok(TogglingFrame { toggled, average, total })
}

/// Direct simulation of the interleaved `[Δt, P₁, …, Δt, P_M]` sequence
/// (oracle partner of [`toggling_frame`]).
pub fn interleaved_propagator(
    h_int: &Operator,
    pulses: &CompositeSequence,
    delta_t_s: f64,
) -> Result<Operator> {
    let dim = h_int.nrows();
    let n_spins = crate::operators::n_spins_of_dim(dim)?;
    let free = expm_hermitian(h_int, delta_t_s)?;
    let mut u = identity(dim);
    for p in &pulses.0 {
        u = rotation_propagator(p, n_spins)? * &free * u;
    }
    Ok(u)
}

/// Carr-Purcell train: `[τ, π_x, 2τ, π_x, …, 2τ, π_x, τ]` with `n_echoes`
/// π pulses; echo maxima sit at t = 2kτ.
pub fn carr_purcell(tau_s: f64, n_echoes: usize, spin: usize) -> Result<PulseProgram> {
    if n_echoes < 1 {
        return Err(Error::InvalidArgument("carr_purcell needs n_echoes ≥ 1".into()));
    }
    if tau_s <= 0.0 {
        return Err(Error::InvalidArgument("carr_purcell needs τ > 0".into()));
    }
    let mut events = vec![Event::Delay(tau_s)];
    for k in 0..n_echoes {
        events.push(Event::Pulse(Pulse::Ideal(RotationSpec::new(
            [1.0, 0.0, 0.0],
            PI,
            spin,
        ))));
        events.push(Event::Delay(if k + 1 == n_echoes { tau_s } else { 2.0 * tau_s }));
    }
    Ok(PulseProgram::new(events))
}

/// Amplitude profile families for shaped pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Rectangular,
    Gaussian,
    HermiteGaussian,
}

/// Discretize a shaped pulse into `n_segments` equal-duration segments.
///
/// The Gaussian profile is truncated at ±3σ; the Hermite-Gaussian profile
/// is (1 − a·(t/σ)²)·exp(−t²/2σ²) with a = 0.667, the standard 180°-type
/// envelope.
pub fn shaped_segments(
    shape: PulseShape,
    peak_amplitude_hz: f64,
    duration_s: f64,
    n_segments: usize,
    phase_rad: f64,
    target: Target,
) -> Result<Vec<PulseSegment>> {
    if n_segments == 0 {
        return Err(Error::InvalidArgument("need at least one segment".into()));
    }
    if duration_s <= 0.0 || peak_amplitude_hz < 0.0 {
        return Err(Error::InvalidArgument("bad shaped-pulse parameters".into()));
    }
    let dt = duration_s / n_segments as f64;
    let sigma = duration_s / 6.0;
    let mid = duration_s / 2.0;
    let profile = |t: f64| -> f64 {
        let x = (t - mid) / sigma;
        match shape {
            PulseShape::Rectangular => 1.0,
            PulseShape::Gaussian => (-0.5 * x * x).exp(),
            PulseShape::HermiteGaussian => (1.0 - 0.667 * x * x) * (-0.5 * x * x).exp(),
        }
    };
    Ok((0..n_segments)
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            PulseSegment {
                amplitude_hz: peak_amplitude_hz * profile(t),
                phase_rad,
                transmitter_offset_hz: 0.0,
                duration_s: dt,
                target: target.clone(),
            }
        })
        .collect())
}

/// Result of a strongly-modulating-pulse search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmpResult {
    pub segments: Vec<PulseSegment>,
    pub fidelity: f64,
    pub evaluations: usize,
    pub restarts: usize,
}

/// Search parameters for [`smp_optimize`].
#[derive(Debug, Clone)]
pub struct SmpOptions {
    pub n_segments: usize,
    pub max_amplitude_hz: f64,
    pub restarts: usize,
    pub max_evaluations_per_restart: usize,
    pub fidelity_tolerance: f64,
    /// Optional starting pulse; restart 0 polishes it (warm start for
    /// resource sweeps).
    pub warm_start: Option<Vec<PulseSegment>>,
}

impl SmpOptions {
    pub fn new(n_segments: usize, max_amplitude_hz: f64) -> Self {
        SmpOptions {
            n_segments,
            max_amplitude_hz,
            restarts: 8,
            max_evaluations_per_restart: 5000,
            fidelity_tolerance: 1e-6,
            warm_start: None,
        }
    }
}

// raw parameter vector layout per segment: [amp_raw, phase, offset_raw, dur_raw]
fn decode_segments(x: &[f64], opts: &SmpOptions, dur_scale: f64, off_scale: f64) -> Vec<PulseSegment> {
    x.chunks_exact(4)
        .map(|c| PulseSegment {
            // smooth fold of the raw value into [0, cap]
            amplitude_hz: opts.max_amplitude_hz * 0.5 * (1.0 + c[0].sin()),
            phase_rad: c[1],
            transmitter_offset_hz: off_scale * c[2],
            duration_s: dur_scale * c[3].clamp(-3.0, 3.0).exp(),
            target: Target::All,
        })
        .collect()
}

fn encode_segments(segs: &[PulseSegment], opts: &SmpOptions, dur_scale: f64, off_scale: f64) -> Vec<f64> {
    let mut x = Vec::with_capacity(segs.len() * 4);
    for s in segs {
        let a = (2.0 * s.amplitude_hz / opts.max_amplitude_hz - 1.0).clamp(-1.0, 1.0);
        x.push(a.asin());
        x.push(s.phase_rad);
        x.push(if off_scale > 0.0 { s.transmitter_offset_hz / off_scale } else { 0.0 });
        x.push((s.duration_s / dur_scale).ln().clamp(-3.0, 3.0));
    }
    x
}

/// Search for a segment list whose propagator matches `target` in
/// ensemble-weighted average gate fidelity, by Nelder-Mead with seeded
/// random restarts. Deterministic for a given seed; restarts run in
/// parallel and are reduced in fixed order.
pub fn smp_optimize(
    target: &Operator,
    sys: &SpinSystem,
    ensemble: &EnsembleSpec,
    opts: &SmpOptions,
    seed: u64,
) -> Result<SmpResult> {

    if opts.n_segments == 0 {
        return Err(Error::InvalidArgument("n_segments must be ≥ 1".into()));
    }
    if target.nrows() != sys.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target dim {} vs system dim {}",
            target.nrows(),
            sys.dim()
        )));
    }
    ensemble.validate()?;

    // duration scale: long enough to resolve the smallest offset gap, short
    // enough that a hard pulse fits in a few segments
    let offsets = sys.offsets_hz();
    let mut min_gap = f64::INFINITY;
    for i in 0..offsets.len() {
        for j in (i + 1)..offsets.len() {
            let g = (offsets[i] - offsets[j]).abs();
            if g > 1e-9 {
                min_gap = min_gap.min(g);
            }
        }
    }
    let dur_scale = if min_gap.is_finite() {
        1.0 / (2.0 * min_gap * opts.n_segments as f64)
    } else {
        1.0 / (4.0 * opts.max_amplitude_hz.max(1.0))
    };
    let off_scale = offsets.iter().map(|o| o.abs()).fold(opts.max_amplitude_hz * 0.2, f64::max);

    // pre-build the per-member systems once
    let members: Vec<(f64, SpinSystem, f64)> = ensemble
        .members()
        .iter()
        .map(|m| (m.weight, sys.with_offset_shift(m.b0_offset_hz), m.rf_scale))
        .collect();

    let objective = |x: &[f64]| -> f64 {
        let segs = decode_segments(x, opts, dur_scale, off_scale);
        let mut fbar = 0.0;
        for (w, msys, rf) in &members {
            let mut u = identity(sys.dim());
            for s in &segs {
                let mut s = s.clone();
                s.amplitude_hz *= rf;
                match segment_propagator(&s, msys) {
                    Ok(p) => u = p * u,
                    Err(_) => return 1.0,
                }
            }
            fbar += w * avg_gate_fidelity(target, &u).expect("dims checked");
        }
        1.0 - fbar
    };

    let nm_opts = NelderMeadOptions {
        tolerance: opts.fidelity_tolerance,
        max_evaluations: opts.max_evaluations_per_restart,
        initial_step: 0.4,
    };

    let runs: Vec<(usize, crate::optimize::MinimizeResult)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                if let Some(ws) = &opts.warm_start {
                    encode_segments(ws, opts, dur_scale, off_scale)
                } else {
                    seeded_start(opts, seed, r)
                }
            } else {
                seeded_start(opts, seed, r)
            };
            (r, nelder_mead(objective, &x0, &nm_opts))
        })
        .collect();

    // fixed-order reduction: lowest objective, ties to the earliest restart
    let mut best: Option<(usize, &crate::optimize::MinimizeResult)> = None;
    let mut evaluations = 0;
    for (r, res) in &runs {
        evaluations += res.evaluations;
        if best.is_none() || res.fmin < best.unwrap().1.fmin {
            best = Some((*r, res));
        }
    }
    let (_, bestres) = best.expect("at least one restart");
    Ok(SmpResult {
        segments: decode_segments(&bestres.x, opts, dur_scale, off_scale),
        fidelity: 1.0 - bestres.fmin,
        evaluations,
        restarts: opts.restarts,
    })
}

fn seeded_start(opts: &SmpOptions, seed: u64, restart: usize) -> Vec<f64> {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    let mut x = Vec::with_capacity(opts.n_segments * 4);
    for _ in 0..opts.n_segments {
        x.push(rng.random_range(-1.2..1.2));
        x.push(rng.random_range(0.0..2.0 * PI));
        x.push(rng.random_range(-0.3..0.3));
        x.push(rng.random_range(-1.0..1.0));
    }
    x
}

/// Total infidelity 1 − F(target, sequence propagator) of a composite
/// sequence evaluated at amplitude error ε.
pub fn composite_infidelity(
    seq: &CompositeSequence,
    ideal: &Operator,
    eps: f64,
    n_spins: usize,
) -> Result<f64> {
    let u = seq.with_error(eps).propagator(n_spins)?;
    Ok(1.0 - avg_gate_fidelity(ideal, &u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{I as IM, single_spin};
    use crate::sequence::EnsembleSpec;
    use crate::spin_system::CouplingModel;

    fn lstsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn full_turn_gives_spinor_sign() {
        let r = RotationSpec::new([0.0, 1.0, 0.0], 2.0 * PI, 1);
        let u = rotation_propagator(&r, 2).unwrap();
        assert!((u + identity(4)).norm() < 1e-12);
    }

    #[test]
    fn quarter_turn_about_x_maps_z_to_minus_y() {
        let r = RotationSpec::new([1.0, 0.0, 0.0], PI / 2.0, 1);
        let u = rotation_propagator(&r, 1).unwrap();
        let iz = single_spin(Axis::Z);
        let iy = single_spin(Axis::Y);
        let got = &u * iz * u.adjoint();
        assert!((got + iy).norm() < 1e-12);
    }

    #[test]
    fn rotation_error_grows_quadratically() {
        for theta in [PI / 2.0, PI] {
            let ideal = rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], theta, 1), 1).unwrap();
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for i in 1..=8 {
                let eps = 0.01 * i as f64;
                let u = rotation_propagator(
                    &RotationSpec::new([1.0, 0.0, 0.0], theta, 1).with_error(eps),
                    1,
                )
                .unwrap();
                let infid = 1.0 - avg_gate_fidelity(&ideal, &u).unwrap();
                xs.push(eps.ln());
                ys.push(infid.ln());
            }
            let slope = lstsq_slope(&xs, &ys);
            assert!((slope - 2.0).abs() < 0.05, "slope {slope} at θ={theta}");
            // quadratic coefficient ≈ θ²/6 (from 1−F = (1−cos εθ)/3)
            let eps = 0.02;
            let u = rotation_propagator(
                &RotationSpec::new([1.0, 0.0, 0.0], theta, 1).with_error(eps),
                1,
            )
            .unwrap();
            let infid = 1.0 - avg_gate_fidelity(&ideal, &u).unwrap();
            let coef = infid / (eps * eps);
            assert!((coef - theta * theta / 6.0).abs() / coef < 0.01);
        }
    }

    #[test]
    fn bb1_collapses_at_zero_error() {
        for theta in [PI / 2.0, PI, 3.0] {
            let seq = bb1(theta).unwrap();
            let ideal =
                rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], theta, 1), 1).unwrap();
            let inf = composite_infidelity(&seq, &ideal, 0.0, 1).unwrap();
            assert!(inf < 1e-10, "θ={theta}: {inf:.2e}");
        }
    }

    #[test]
    fn bb1_error_law_at_quarter_turn() {
        // the ε⁶ coefficient 21π⁶/16384 describes θ=π/2
        let theta = PI / 2.0;
        let seq = bb1(theta).unwrap();
        let ideal = rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], theta, 1), 1).unwrap();
        for eps in [0.02, 0.05, 0.1] {
            let inf = composite_infidelity(&seq, &ideal, eps, 1).unwrap();
            let pred = 21.0 * PI.powi(6) * eps.powi(6) / 16384.0;
            assert!(
                inf < 2.0 * pred && inf > pred / 2.0,
                "ε={eps}: infidelity {inf:.3e} vs predicted {pred:.3e}"
            );
        }
    }

    #[test]
    fn bb1_beats_single_pulse_and_is_even_in_error() {
        let theta = PI;
        let seq = bb1(theta).unwrap();
        let spec = RotationSpec::new([1.0, 0.0, 0.0], theta, 1);
        let ideal = rotation_propagator(&spec, 1).unwrap();
        for i in 1..=10 {
            let eps = 0.01 * i as f64;
            for sign in [1.0, -1.0] {
                let e = sign * eps;
                let single = 1.0
                    - avg_gate_fidelity(
                        &ideal,
                        &rotation_propagator(&spec.clone().with_error(e), 1).unwrap(),
                    )
                    .unwrap();
                let comp = composite_infidelity(&seq, &ideal, e, 1).unwrap();
                assert!(comp < single, "ε={e}: bb1 {comp:.2e} vs single {single:.2e}");
            }
            let plus = composite_infidelity(&seq, &ideal, eps, 1).unwrap();
            let minus = composite_infidelity(&seq, &ideal, -eps, 1).unwrap();
            assert!((plus - minus).abs() < 1e-9);
        }
    }

    #[test]
    fn bb1_rejects_bad_angle() {
        assert!(bb1(0.0).is_err());
        assert!(bb1(7.0).is_err());
    }

    #[test]
    fn zero_amplitude_segment_is_free_evolution() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![40.0, -25.0],
            vec![vec![0.0, 12.0], vec![12.0, 0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let seg = PulseSegment {
            amplitude_hz: 0.0,
            phase_rad: 0.0,
            transmitter_offset_hz: 0.0,
            duration_s: 3.3e-3,
            target: Target::All,
        };
        let u = segment_propagator(&seg, &sys).unwrap();
        let free = expm_hermitian(&sys.internal_hamiltonian(), 3.3e-3).unwrap();
        assert!((u - free).norm() < 1e-12);
    }

    #[test]
    fn on_resonance_nutation() {
        let sys = SpinSystem::uncoupled(1, 0.0);
        let nu1 = 25_000.0;
        let seg = PulseSegment {
            amplitude_hz: nu1,
            phase_rad: 0.0,
            transmitter_offset_hz: 0.0,
            duration_s: 1.0 / (4.0 * nu1),
            target: Target::All,
        };
        let u = segment_propagator(&seg, &sys).unwrap();
        let want = rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], PI / 2.0, 1), 1).unwrap();
        assert!((u - want).norm() < 1e-6);
    }

    #[test]
    fn strong_pulse_approaches_hard_rotation() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![0.0, 120.0],
            vec![vec![0.0, 30.0], vec![30.0, 0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        // collective hard π/2 about x on both spins
        let hard = rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], PI / 2.0, 1), 2)
            .unwrap()
            * rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], PI / 2.0, 2), 2).unwrap();
        let mut last = 0.0;
        for amp in [5e3, 5e4, 5e5] {
            let seg = PulseSegment {
                amplitude_hz: amp,
                phase_rad: 0.0,
                transmitter_offset_hz: 0.0,
                duration_s: 1.0 / (4.0 * amp),
                target: Target::All,
            };
            let u = segment_propagator(&seg, &sys).unwrap();
            let f = avg_gate_fidelity(&hard, &u).unwrap();
            assert!(f > last, "fidelity should improve with amplitude");
            last = f;
        }
        // ‖H_int‖/2π ~ hundreds of Hz; at 5e5 Hz the ratio exceeds 10³
        assert!(last >= 1.0 - 1e-4, "fidelity {last}");
    }

    #[test]
    fn spin_echo_toggling_frame() {
        let sys = SpinSystem::uncoupled(1, 85.0);
        let h = sys.internal_hamiltonian();
        let train = CompositeSequence(vec![
            RotationSpec::new([1.0, 0.0, 0.0], PI, 1),
            RotationSpec::new([1.0, 0.0, 0.0], PI, 1),
        ]);
        let tf = toggling_frame(&h, &train, 2.0e-3).unwrap();
        assert!(tf.average.norm() < 1e-12, "echo average Hamiltonian ≠ 0");
        // total propagator is the identity up to phase
        let phase = tf.total[(0, 0)] / c64(tf.total[(0, 0)].norm(), 0.0);
        assert!((tf.total.clone() / phase - identity(2)).norm() < 1e-10);
        // exact-product identity against direct simulation
        let direct = interleaved_propagator(&h, &train, 2.0e-3).unwrap();
        let f = avg_gate_fidelity(&direct, &tf.total).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn toggling_frame_exact_product_identity_random_train() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![55.0, -70.0],
            vec![vec![0.0, 18.0], vec![18.0, 0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let h = sys.internal_hamiltonian();
        // random rotations followed by their inverses in reverse order: cyclic
        let mut fw = Vec::new();
        for _ in 0..3 {
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            let angle: f64 = rng.random_range(0.3..2.5);
            let spin = rng.random_range(1..=2);
            fw.push(RotationSpec::transverse(phase, angle, spin));
        }
        let mut all = fw.clone();
        for r in fw.iter().rev() {
            let mut inv = r.clone();
            inv.angle_rad = -inv.angle_rad;
            all.push(inv);
        }
        let train = CompositeSequence(all);
        let tf = toggling_frame(&h, &train, 1.7e-3).unwrap();
        let direct = interleaved_propagator(&h, &train, 1.7e-3).unwrap();
        let f = avg_gate_fidelity(&direct, &tf.total).unwrap();
        assert!((f - 1.0).abs() < 1e-10, "identity violated: F = {f}");
    }

    #[test]
    fn toggling_frame_rejects_non_cyclic_train() {
        let h = SpinSystem::uncoupled(1, 40.0).internal_hamiltonian();
        let train = CompositeSequence(vec![RotationSpec::new([1.0, 0.0, 0.0], PI, 1)]);
        assert!(toggling_frame(&h, &train, 1e-3).is_err());
    }

    #[test]
    fn empty_train_is_rejected_and_identity_train_returns_h() {
        let h = SpinSystem::uncoupled(1, 40.0).internal_hamiltonian();
        assert!(toggling_frame(&h, &CompositeSequence(vec![]), 1e-3).is_err());
        // a single zero-angle pulse: H̄ = H exactly
        let train = CompositeSequence(vec![RotationSpec::new([1.0, 0.0, 0.0], 0.0, 1)]);
        let tf = toggling_frame(&h, &train, 1e-3).unwrap();
        assert!((tf.average - h).norm() < 1e-14);
    }

    #[test]
    fn carr_purcell_validation() {
        assert!(carr_purcell(1e-3, 0, 1).is_err());
        assert!(carr_purcell(-1.0, 2, 1).is_err());
        let prog = carr_purcell(1e-3, 3, 1).unwrap();
        assert_eq!(prog.events().len(), 7);
        assert!((prog.total_duration() - 6e-3).abs() < 1e-12);
    }

    #[test]
    fn shaped_segment_profiles() {
        let segs = shaped_segments(PulseShape::Gaussian, 1000.0, 1e-3, 32, 0.0, Target::All).unwrap();
        assert_eq!(segs.len(), 32);
        let peak = segs.iter().map(|s| s.amplitude_hz).fold(0.0, f64::max);
        assert!(peak > 990.0 && peak <= 1000.0);
        // symmetric profile
        assert!((segs[0].amplitude_hz - segs[31].amplitude_hz).abs() < 1e-9);
        let rect = shaped_segments(PulseShape::Rectangular, 500.0, 1e-3, 4, 0.1, Target::All).unwrap();
        assert!(rect.iter().all(|s| (s.amplitude_hz - 500.0).abs() < 1e-12));
        let herm =
            shaped_segments(PulseShape::HermiteGaussian, 800.0, 1e-3, 16, 0.0, Target::All).unwrap();
        // hermite envelope goes negative in the wings
        assert!(herm.iter().any(|s| s.amplitude_hz < 0.0));
        let _ = IM;
    }

    #[test]
    fn smp_single_spin_quarter_turn() {
        let sys = SpinSystem::uncoupled(1, 0.0);
        let target = rotation_propagator(&RotationSpec::new([1.0, 0.0, 0.0], PI / 2.0, 1), 1).unwrap();
        let opts = SmpOptions {
            restarts: 4,
            ..SmpOptions::new(1, 10_000.0)
        };
        let res = smp_optimize(&target, &sys, &EnsembleSpec::singleton(), &opts, 7).unwrap();
        assert!(res.fidelity >= 0.9999, "fidelity {}", res.fidelity);
    }

    #[test]
    fn smp_deterministic_for_a_seed() {
        let sys = SpinSystem::uncoupled(1, 0.0);
        let target = rotation_propagator(&RotationSpec::new([0.0, 1.0, 0.0], PI / 2.0, 1), 1).unwrap();
        let opts = SmpOptions {
            restarts: 2,
            max_evaluations_per_restart: 400,
            ..SmpOptions::new(1, 5_000.0)
        };
        let a = smp_optimize(&target, &sys, &EnsembleSpec::singleton(), &opts, 3).unwrap();
        let b = smp_optimize(&target, &sys, &EnsembleSpec::singleton(), &opts, 3).unwrap();
        assert_eq!(a.fidelity.to_bits(), b.fidelity.to_bits());
    }
}
