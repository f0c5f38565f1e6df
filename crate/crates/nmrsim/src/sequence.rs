//! Pulse programs — the machine language of pulses, delays and frame
//! rotations — executed over single systems or incoherent ensembles.
//!
//! A [`PulseProgram`] is an ordered event list. In `Ideal` mode rotation
//! pulses are instantaneous and internal evolution happens only in delays;
//! in `Finite` mode ideal rotations are realized as rectangular segments at
//! a stated RF amplitude and evolve under H_int + H_rf. Frame z-rotations
//! consume zero time and are always exact.
//!
//! Ensemble execution realizes the operator-sum picture of incoherent
//! noise: ρ(t) = Σ pᵢ Uᵢ ρ(0) Uᵢ†, with members differing in RF scale
//! and static-field offset.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::control::{rotation_propagator, segment_propagator, PulseSegment, RotationSpec, Target};
use crate::operators::{c64, expm_hermitian, identity, spin_op, Axis, Operator, State};
use crate::spin_system::{CouplingModel, SpinSystem};
use crate::{Error, Result};

/// A pulse event: an ideal rotation or a finite RF segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pulse {
    Ideal(RotationSpec),
    Shaped(PulseSegment),
}

/// One program event.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Pulse { pulse: Pulse },
    Delay { duration_s: f64 },
    FrameZ { spin: usize, angle_rad: f64 },
}

#[allow(non_snake_case)]
impl Event {
    /// Convenience constructor used throughout the crate.
    pub fn Pulse(p: Pulse) -> Event {
        Event::Pulse { pulse: p }
    }

    /// Convenience constructor used throughout the crate.
    pub fn Delay(duration_s: f64) -> Event {
        Event::Delay { duration_s }
    }
}

/// Ordered list of events; serializes as `{"events":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseProgram {
    events: Vec<Event>,
}

impl PulseProgram {
    pub fn new(events: Vec<Event>) -> Self {
        PulseProgram { events }
    }

    pub fn empty() -> Self {
        PulseProgram { events: Vec::new() }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn extend(&mut self, other: &PulseProgram) {
        self.events.extend(other.events.iter().cloned());
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.events {
            match e {
                Event::Delay { duration_s } if *duration_s <= 0.0 => {
                    return Err(Error::InvalidProgram("delay duration must be > 0".into()))
                }
                Event::Pulse { pulse: Pulse::Shaped(s) } => s.validate()?,
                Event::Pulse { pulse: Pulse::Ideal(r) } => r.validate()?,
                _ => {}
            }
        }
        Ok(())
    }

    /// Wall-clock duration: delays plus finite segments (ideal pulses and
    /// frame rotations are instantaneous).
    pub fn total_duration(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                Event::Delay { duration_s } => *duration_s,
                Event::Pulse { pulse: Pulse::Shaped(s) } => s.duration_s,
                _ => 0.0,
            })
            .sum()
    }
}

/// Pulse realization mode for [`run_program`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseMode {
    /// Rotations are instantaneous.
    Ideal,
    /// Ideal rotations become rectangular segments at this amplitude (Hz).
    Finite { amplitude_hz: f64 },
}

/// One incoherent-ensemble member: RF-field scale, static-field shift,
/// and its weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub rf_scale: f64,
    pub b0_offset_hz: f64,
    pub weight: f64,
}

/// Discrete weighted distribution of RF-scaling and static-offset errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpec {
    members: Vec<EnsembleMember>,
}

impl EnsembleSpec {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        let e = EnsembleSpec { members };
        e.validate()?;
        Ok(e)
    }

    /// The trivial ensemble {scale 1, offset 0, p 1}.
    pub fn singleton() -> Self {
        EnsembleSpec {
            members: vec![EnsembleMember { rf_scale: 1.0, b0_offset_hz: 0.0, weight: 1.0 }],
        }
    }

    /// Gaussian-weighted static-offset grid: `n` points equally spaced over
    /// ±3σ, weights ∝ exp(−δ²/2σ²), normalized.
    pub fn gaussian_b0(sigma_hz: f64, n: usize) -> Result<Self> {
        if n == 0 || sigma_hz < 0.0 {
            return Err(Error::InvalidEnsemble("need n ≥ 1 and σ ≥ 0".into()));
        }
        if n == 1 || sigma_hz == 0.0 {
            return Ok(Self::singleton());
        }
        let mut members = Vec::with_capacity(n);
        let mut total = 0.0;
        for i in 0..n {
            let x = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
            let w = (-0.5 * x * x).exp();
            members.push(EnsembleMember { rf_scale: 1.0, b0_offset_hz: x * sigma_hz, weight: w });
            total += w;
        }
        for m in &mut members {
            m.weight /= total;
        }
        Ok(EnsembleSpec { members })
    }

    /// Gaussian-weighted RF-scale grid over `center ± 3σ`.
    pub fn rf_grid(center: f64, sigma: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidEnsemble("need n ≥ 1".into()));
        }
        if n == 1 || sigma == 0.0 {
            return Ok(EnsembleSpec {
                members: vec![EnsembleMember { rf_scale: center, b0_offset_hz: 0.0, weight: 1.0 }],
            });
        }
        let mut members = Vec::with_capacity(n);
        let mut total = 0.0;
        for i in 0..n {
            let x = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
            let w = (-0.5 * x * x).exp();
            members.push(EnsembleMember { rf_scale: center + x * sigma, b0_offset_hz: 0.0, weight: w });
            total += w;
        }
        for m in &mut members {
            m.weight /= total;
        }
        Ok(EnsembleSpec { members })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidEnsemble("ensemble has no members".into()));
        }
        if self.members.iter().any(|m| m.weight <= 0.0) {
            return Err(Error::InvalidEnsemble("weights must be > 0".into()));
        }
        let total: f64 = self.members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }
}

/// Output of a single-system run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: State,
    /// Ordered product of all event unitaries.
    pub total: Operator,
}

fn event_unitary(e: &Event, sys: &SpinSystem, mode: PulseMode, rf_scale: f64) -> Result<Operator> {
    let n = sys.n_spins();
    match e {
        Event::Delay { duration_s } => {
            expm_hermitian(&sys.internal_hamiltonian(), *duration_s)
        }
        Event::FrameZ { spin, angle_rad } => {
            let iz = spin_op(n, *spin, Axis::Z)?;
            expm_hermitian(&iz, *angle_rad)
        }
        Event::Pulse { pulse } => match (pulse, mode) {
            (Pulse::Ideal(r), PulseMode::Ideal) => {
                let mut r = r.clone();
                r.angle_rad *= rf_scale;
                rotation_propagator(&r, n)
            }
            (Pulse::Ideal(r), PulseMode::Finite { amplitude_hz }) => {
                if r.axis[2].abs() > 1e-12 {
                    return Err(Error::InvalidProgram(
                        "finite mode requires transverse rotation axes (use FrameZ for z)".into(),
                    ));
                }
                let phase = r.axis[1].atan2(r.axis[0]);
                let (phase, angle) = if r.angle_rad < 0.0 {
                    (phase + PI, -r.angle_rad)
                } else {
                    (phase, r.angle_rad)
                };
                let seg = PulseSegment {
                    amplitude_hz: amplitude_hz * rf_scale,
                    phase_rad: phase,
                    transmitter_offset_hz: 0.0,
                    duration_s: angle * (1.0 + r.amplitude_error) / (2.0 * PI * amplitude_hz),
                    target: Target::Spins(vec![r.spin]),
                };
                segment_propagator(&seg, sys)
            }
            (Pulse::Shaped(s), _) => {
                let mut s = s.clone();
                s.amplitude_hz *= rf_scale;
                segment_propagator(&s, sys)
            }
        },
    }
}

/// Execute a program on one system; returns the final state and the exact
/// ordered product of the per-event unitaries.
pub fn run_program(
    prog: &PulseProgram,
    sys: &SpinSystem,
    rho0: &State,
    mode: PulseMode,
) -> Result<RunOutput> {
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs system dim {}",
            rho0.dim(),
            sys.dim()
        )));
    }
    prog.validate()?;
    let mut total = identity(sys.dim());
    for e in prog.events() {
        total = event_unitary(e, sys, mode, 1.0)? * total;
    }
    Ok(RunOutput { state: rho0.evolve(&total), total })
}

/// One sampled point of a trajectory: time and the expectation values of
/// the requested observables.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub t_s: f64,
    pub values: Vec<Complex64>,
}

/// Execute a program, sampling observables at every event boundary and,
/// inside delays, every `sample_dt` seconds when given.
pub fn run_program_trajectory(
    prog: &PulseProgram,
    sys: &SpinSystem,
    rho0: &State,
    mode: PulseMode,
    observables: &[Operator],
    sample_dt: Option<f64>,
) -> Result<Vec<TrajectoryPoint>> {
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch("trajectory state/system".into()));
    }
    prog.validate()?;
    let mut state = rho0.clone();
    let mut t = 0.0;
    let mut out = Vec::new();
    let record = |t: f64, s: &State, out: &mut Vec<TrajectoryPoint>| {
        out.push(TrajectoryPoint {
            t_s: t,
            values: observables.iter().map(|o| s.expect(o)).collect(),
        });
    };
    record(t, &state, &mut out);
    for e in prog.events() {
        match (e, sample_dt) {
            (Event::Delay { duration_s }, Some(dt)) if dt < *duration_s => {
                let steps = (duration_s / dt).floor() as usize;
                let u = expm_hermitian(&sys.internal_hamiltonian(), dt)?;
                let mut done = 0.0;
                for _ in 0..steps {
                    state = state.evolve(&u);
                    done += dt;
                    t += dt;
                    record(t, &state, &mut out);
                }
                let rest = duration_s - done;
                if rest > 1e-15 {
                    let u = expm_hermitian(&sys.internal_hamiltonian(), rest)?;
                    state = state.evolve(&u);
                    t += rest;
                    record(t, &state, &mut out);
                }
            }
            _ => {
                let u = event_unitary(e, sys, mode, 1.0)?;
                state = state.evolve(&u);
                if let Event::Delay { duration_s } = e {
                    t += duration_s;
                } else if let Event::Pulse { pulse: Pulse::Shaped(s) } = e {
                    t += s.duration_s;
                }
                record(t, &state, &mut out);
            }
        }
    }
    Ok(out)
}

/// Run a program over an incoherent ensemble: each member scales pulse
/// amplitudes by `rf_scale` and shifts every offset by `b0_offset_hz`; the
/// returned state is the weight-averaged density matrix (members evaluated
/// in parallel, summed in fixed member order).
pub fn run_ensemble(
    prog: &PulseProgram,
    sys: &SpinSystem,
    rho0: &State,
    ens: &EnsembleSpec,
) -> Result<State> {
    run_ensemble_mode(prog, sys, rho0, ens, PulseMode::Ideal)
}

/// [`run_ensemble`] with an explicit pulse mode.
pub fn run_ensemble_mode(
    prog: &PulseProgram,
    sys: &SpinSystem,
    rho0: &State,
    ens: &EnsembleSpec,
    mode: PulseMode,
) -> Result<State> {
    ens.validate()?;
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch("ensemble state/system".into()));
    }
    let runs: Vec<Result<Operator>> = ens
        .members()
        .par_iter()
        .map(|m| -> Result<Operator> {
            let msys = sys.with_offset_shift(m.b0_offset_hz);
            let mut total = identity(sys.dim());
            for e in prog.events() {
                total = event_unitary(e, &msys, mode, m.rf_scale)? * total;
            }
            Ok(&total * &rho0.matrix * total.adjoint() * c64(m.weight, 0.0))
        })
        .collect();
    let mut acc = Operator::zeros(sys.dim(), sys.dim());
    for r in runs {
        acc += r?;
    }
    State::new(acc, rho0.kind)
}

/// Compile a CNOT between two J-coupled spins into frame rotations, ideal
/// y-rotations and one J evolution, with midpoint echo refocusing on every
/// spectator spin and frame-rotation compensation of the Zeeman phases
/// accrued by control and target during the delay.
///
/// The emitted unitary equals the canonical CNOT up to a global phase in
/// ideal-pulse mode.
pub fn compile_cnot(control: usize, target: usize, sys: &SpinSystem) -> Result<PulseProgram> {
    compile_cnot_opts(control, target, sys, true)
}

/// [`compile_cnot`] with spectator refocusing optional (used to demonstrate
/// the error it corrects).
pub fn compile_cnot_opts(
    control: usize,
    target: usize,
    sys: &SpinSystem,
    refocus: bool,
) -> Result<PulseProgram> {
    let n = sys.n_spins();
    if control == target || control < 1 || control > n || target < 1 || target > n {
        return Err(Error::InvalidArgument(format!(
            "bad control/target pair ({control}, {target})"
        )));
    }
    if sys.model() != CouplingModel::WeakJ {
        return Err(Error::InvalidArgument(
            "compile_cnot requires the weak_j coupling model".into(),
        ));
    }
    let j = sys.j_hz(control, target);
    if j == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "spins {control} and {target} are not coupled"
        )));
    }
    let tau = 1.0 / (2.0 * j.abs());
    let zz_sign = j.signum();

    let mut events = Vec::new();
    // R_y(−90°) on the target acts first
    events.push(Event::Pulse(Pulse::Ideal(RotationSpec::new(
        [0.0, 1.0, 0.0],
        -PI / 2.0,
        target,
    ))));
    // J evolution for 1/(2J), echoing the spectators at the midpoint
    let spectators: Vec<usize> = (1..=n).filter(|&s| s != control && s != target).collect();
    if refocus && !spectators.is_empty() {
        for half in 0..2 {
            events.push(Event::Delay(tau / 2.0));
            for &s in &spectators {
                events.push(Event::Pulse(Pulse::Ideal(RotationSpec::new(
                    [1.0, 0.0, 0.0],
                    PI,
                    s,
                ))));
            }
            let _ = half;
        }
    } else {
        events.push(Event::Delay(tau));
    }
    // undo the Zeeman phase the delay put on control and target
    for &k in &[control, target] {
        let nu = sys.offsets_hz()[k - 1];
        if nu != 0.0 {
            events.push(Event::FrameZ { spin: k, angle_rad: -2.0 * PI * nu * tau });
        }
    }
    // the controlled-phase's z rotations: R_z(∓90°) on both spins
    events.push(Event::FrameZ { spin: control, angle_rad: -zz_sign * PI / 2.0 });
    events.push(Event::FrameZ { spin: target, angle_rad: -zz_sign * PI / 2.0 });
    // closing R_y(+90°) on the target
    events.push(Event::Pulse(Pulse::Ideal(RotationSpec::new(
        [0.0, 1.0, 0.0],
        PI / 2.0,
        target,
    ))));
    Ok(PulseProgram::new(events))
}

/// The canonical CNOT unitary on `n` spins (1-based control/target).
pub fn cnot_unitary(n: usize, control: usize, target: usize) -> Operator {
    let dim = 1 << n;
    let mut u = Operator::zeros(dim, dim);
    for idx in 0..dim {
        let cbit = (idx >> (n - control)) & 1;
        let out = if cbit == 1 { idx ^ (1 << (n - target)) } else { idx };
        u[(out, idx)] = c64(1.0, 0.0);
    }
    u
}

/// Temporal-averaging pseudo-pure preparation for 2- and 3-spin systems.
///
/// Emits CNOT-network programs that cyclically permute the populations of
/// all basis states except |0…0⟩ (2 spins: a 3-cycle, 3 programs; 3 spins:
/// a linear 7-cycle, 7 programs) and returns the uniform average of the
/// permuted inputs, which equals α|0…0⟩⟨0…0| + (1−α)/2^N · 1 on the
/// diagonal.
pub fn pseudo_pure_temporal(
    sys: &SpinSystem,
    rho_thermal: &State,
) -> Result<(Vec<PulseProgram>, State)> {
    let n = sys.n_spins();
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "temporal averaging implemented for 2..=3 spins, got {n}"
        )));
    }
    if rho_thermal.dim() != sys.dim() {
        return Err(Error::DimensionMismatch("thermal state/system".into()));
    }
    // diagonal dominance: the construction permutes populations only
    let offdiag: f64 = {
        let mut m = rho_thermal.matrix.clone();
        m.set_diagonal(&nalgebra::DVector::from_element(m.nrows(), c64(0.0, 0.0)));
        m.norm()
    };
    if offdiag > 1e-8 {
        return Err(Error::InvalidState(
            "temporal averaging expects a diagonal (thermal) input".into(),
        ));
    }

    let cycle: PulseProgram = match n {
        2 => {
            // 01 → 11 → 10 → 01, built as CNOT(1→2) then CNOT(2→1)
            let mut p = compile_cnot(1, 2, sys)?;
            p.extend(&compile_cnot(2, 1, sys)?);
            p
        }
        3 => {
            // multiplication by x in F₂[x]/(x³+x+1) 7-cycles the nonzero
            // states. With spin k holding bit b_(3−k) the map is
            //   (b2,b1,b0) → (b1, b0⊕b2, b2),
            // realized as CNOT(1→3) followed by the wire rotation
            // SWAP(1,2)·SWAP(2,3), each swap being three CNOTs.
            let mut p = compile_cnot(1, 3, sys)?;
            for (c, t) in [(1usize, 2usize), (2, 1), (1, 2)] {
                p.extend(&compile_cnot(c, t, sys)?);
            }
            for (c, t) in [(2usize, 3usize), (3, 2), (2, 3)] {
                p.extend(&compile_cnot(c, t, sys)?);
            }
            p
        }
        _ => unreachable!(),
    };

    let n_programs = (1 << n) - 1;
    let mut programs = Vec::with_capacity(n_programs);
    let mut avg = Operator::zeros(sys.dim(), sys.dim());
    for m in 0..n_programs {
        let mut prog = PulseProgram::empty();
        for _ in 0..m {
            prog.extend(&cycle);
        }
        let out = run_program(&prog, sys, rho_thermal, PulseMode::Ideal)?;
        avg += &out.state.matrix / c64(n_programs as f64, 0.0);
        programs.push(prog);
    }
    Ok((programs, State::new(avg, rho_thermal.kind)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{avg_gate_fidelity, StateKind};
    use crate::spin_system::{thermal_state, ThermalMode, ThermalParams};

    fn weak2(j: f64, nu1: f64, nu2: f64) -> SpinSystem {
        SpinSystem::new(
            vec!["A".into(), "B".into()],
            vec![nu1, nu2],
            vec![vec![0.0, j], vec![j, 0.0]],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap()
    }

    #[test]
    fn empty_program_is_identity() {
        let sys = weak2(50.0, 0.0, 0.0);
        let rho = State::basis_state(2, 2);
        let out = run_program(&PulseProgram::empty(), &sys, &rho, PulseMode::Ideal).unwrap();
        assert!((out.total.clone() - identity(4)).norm() < 1e-15);
        assert!((out.state.matrix - rho.matrix).norm() < 1e-15);
    }

    #[test]
    fn half_j_delay_gives_controlled_phase_core() {
        let j = 40.0;
        let sys = weak2(j, 0.0, 0.0);
        let prog = PulseProgram::new(vec![Event::Delay(1.0 / (2.0 * j))]);
        let out = run_program(&prog, &sys, &State::maximally_mixed(2), PulseMode::Ideal).unwrap();
        let want = [-PI / 4.0, PI / 4.0, PI / 4.0, -PI / 4.0];
        for (i, w) in want.iter().enumerate() {
            let z = out.total[(i, i)];
            assert!((z - c64(w.cos(), w.sin())).norm() < 1e-12, "phase {i}");
        }
    }

    #[test]
    fn echo_returns_transverse_state() {
        let sys = SpinSystem::uncoupled(1, 133.0);
        let plus = State::new(
            identity(2) * c64(0.5, 0.0) + spin_op(1, 1, Axis::X).unwrap(),
            StateKind::Pure,
        )
        .unwrap();
        let tau = 3.4e-3;
        let prog = PulseProgram::new(vec![
            Event::Delay(tau),
            Event::Pulse(Pulse::Ideal(RotationSpec::new([1.0, 0.0, 0.0], PI, 1))),
            Event::Delay(tau),
        ]);
        let out = run_program(&prog, &sys, &plus, PulseMode::Ideal).unwrap();
        // refocused to I_x up to the π-pulse's own reflection (x → x)
        let ix = spin_op(1, 1, Axis::X).unwrap();
        let got = out.state.expect(&ix).re;
        assert!((got - 0.5).abs() < 1e-9, "⟨I_x⟩ = {got}");
    }

    #[test]
    fn frame_z_commutes_with_delay_for_weak_j() {
        let sys = weak2(30.0, 70.0, -45.0);
        let a = PulseProgram::new(vec![
            Event::FrameZ { spin: 1, angle_rad: 0.7 },
            Event::Delay(2.1e-3),
        ]);
        let b = PulseProgram::new(vec![
            Event::Delay(2.1e-3),
            Event::FrameZ { spin: 1, angle_rad: 0.7 },
        ]);
        let rho = State::maximally_mixed(2);
        let ua = run_program(&a, &sys, &rho, PulseMode::Ideal).unwrap().total;
        let ub = run_program(&b, &sys, &rho, PulseMode::Ideal).unwrap().total;
        assert!((ua - ub).norm() < 1e-10);
    }

    #[test]
    fn cnot_truth_table_and_fidelity() {
        let sys = weak2(215.0, 0.0, 0.0);
        let prog = compile_cnot(1, 2, &sys).unwrap();
        // |10⟩ → |11⟩
        let out = run_program(&prog, &sys, &State::basis_state(2, 2), PulseMode::Ideal).unwrap();
        let p = out.state.populations();
        assert!((p[3] - 1.0).abs() < 1e-9, "populations {p:?}");
        // |00⟩ → |00⟩
        let out0 = run_program(&prog, &sys, &State::basis_state(2, 0), PulseMode::Ideal).unwrap();
        assert!((out0.state.populations()[0] - 1.0).abs() < 1e-9);
        // unitary equals canonical CNOT up to global phase
        let f = avg_gate_fidelity(&cnot_unitary(2, 1, 2), &out.total).unwrap();
        assert!(f >= 1.0 - 1e-9, "fidelity {f}");
        // involution
        let sq = &out.total * &out.total;
        let f2 = avg_gate_fidelity(&identity(4), &sq).unwrap();
        assert!(f2 >= 1.0 - 1e-9);
    }

    #[test]
    fn cnot_with_offsets_and_negative_j() {
        for (j, n1, n2) in [(140.0, 80.0, -60.0), (-140.0, 35.0, 120.0)] {
            let sys = weak2(j, n1, n2);
            let prog = compile_cnot(2, 1, &sys).unwrap();
            let u = run_program(&prog, &sys, &State::maximally_mixed(2), PulseMode::Ideal)
                .unwrap()
                .total;
            let f = avg_gate_fidelity(&cnot_unitary(2, 2, 1), &u).unwrap();
            assert!(f >= 1.0 - 1e-9, "J={j}: fidelity {f}");
        }
    }

    #[test]
    fn cnot_requires_coupling() {
        let sys = weak2(0.0, 0.0, 0.0);
        assert!(compile_cnot(1, 2, &sys).is_err());
        let sys3 = weak2(10.0, 0.0, 0.0);
        assert!(compile_cnot(1, 1, &sys3).is_err());
    }

    #[test]
    fn spectator_refocusing_matters() {
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![0.0, 0.0, 0.0],
            vec![
                vec![0.0, 90.0, 35.0],
                vec![90.0, 0.0, 50.0],
                vec![35.0, 50.0, 0.0],
            ],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let want = cnot_unitary(3, 1, 2);
        let with = run_program(
            &compile_cnot(1, 2, &sys).unwrap(),
            &sys,
            &State::maximally_mixed(3),
            PulseMode::Ideal,
        )
        .unwrap()
        .total;
        let f_with = avg_gate_fidelity(&want, &with).unwrap();
        assert!(f_with >= 1.0 - 1e-6, "refocused fidelity {f_with}");
        let without = run_program(
            &compile_cnot_opts(1, 2, &sys, false).unwrap(),
            &sys,
            &State::maximally_mixed(3),
            PulseMode::Ideal,
        )
        .unwrap()
        .total;
        let f_without = avg_gate_fidelity(&want, &without).unwrap();
        assert!(f_without < 0.99, "unrefocused fidelity {f_without}");
    }

    #[test]
    fn cnot_finite_mode() {
        let sys = weak2(215.0, 0.0, 0.0);
        let prog = compile_cnot(1, 2, &sys).unwrap();
        let u = run_program(
            &prog,
            &sys,
            &State::maximally_mixed(2),
            PulseMode::Finite { amplitude_hz: 25_000.0 },
        )
        .unwrap()
        .total;
        let f = avg_gate_fidelity(&cnot_unitary(2, 1, 2), &u).unwrap();
        assert!(f >= 0.99, "finite-pulse fidelity {f}");
    }

    #[test]
    fn singleton_ensemble_matches_run_program() {
        let sys = weak2(25.0, 40.0, -10.0);
        let prog = PulseProgram::new(vec![
            Event::Pulse(Pulse::Ideal(RotationSpec::new([0.0, 1.0, 0.0], PI / 2.0, 1))),
            Event::Delay(1.0e-3),
        ]);
        let rho = State::basis_state(2, 0);
        let single = run_program(&prog, &sys, &rho, PulseMode::Ideal).unwrap().state;
        let ens = run_ensemble(&prog, &sys, &rho, &EnsembleSpec::singleton()).unwrap();
        assert!((single.matrix - ens.matrix).norm() < 1e-12);
    }

    #[test]
    fn two_member_dephasing_cosine() {
        let sys = SpinSystem::uncoupled(1, 0.0);
        let dnu = 80.0;
        let ens = EnsembleSpec::new(vec![
            EnsembleMember { rf_scale: 1.0, b0_offset_hz: dnu, weight: 0.5 },
            EnsembleMember { rf_scale: 1.0, b0_offset_hz: -dnu, weight: 0.5 },
        ])
        .unwrap();
        let plus = State::new(
            identity(2) * c64(0.5, 0.0) + spin_op(1, 1, Axis::X).unwrap(),
            StateKind::Pure,
        )
        .unwrap();
        let ix = spin_op(1, 1, Axis::X).unwrap();
        for t in [1.0e-3, 2.5e-3, 4.0e-3] {
            let prog = PulseProgram::new(vec![Event::Delay(t)]);
            let out = run_ensemble(&prog, &sys, &plus, &ens).unwrap();
            let got = out.expect(&ix).re;
            let want = 0.5 * (2.0 * PI * dnu * t).cos();
            assert!((got - want).abs() < 1e-10, "t={t}: {got} vs {want}");
            // trace and positivity preserved
            assert!((out.matrix.diagonal().sum().re - 1.0).abs() < 1e-10);
            let (vals, _) = crate::operators::eigh(&out.matrix).unwrap();
            assert!(vals.iter().all(|&v| v > -1e-10));
        }
    }

    #[test]
    fn pseudo_pure_two_spin_pattern() {
        let sys = weak2(215.0, 0.0, 0.0);
        let tp = ThermalParams::new(11.74, 300.0, vec![42.577e6, 42.577e6]).unwrap();
        let rho = thermal_state(&sys, &tp, ThermalMode::HighTemperature).unwrap();
        let (progs, avg) = pseudo_pure_temporal(&sys, &rho).unwrap();
        assert_eq!(progs.len(), 3);
        let p = avg.populations();
        // the three non-|00⟩ populations equalize
        assert!((p[1] - p[2]).abs() < 1e-8 && (p[2] - p[3]).abs() < 1e-8, "{p:?}");
        assert!(p[0] > p[1]);
        // diagonal deviation from α|00⟩⟨00| + uniform background is tiny
        let alpha = p[0] - p[1];
        let uniform = (1.0 - alpha) / 4.0;
        assert!((p[1] - uniform).abs() < 1e-8);
    }

    #[test]
    fn pseudo_pure_three_spin_and_fixed_points() {
        let j = 60.0;
        let sys = SpinSystem::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![0.0, 0.0, 0.0],
            vec![
                vec![0.0, j, j / 2.0],
                vec![j, 0.0, j / 3.0],
                vec![j / 2.0, j / 3.0, 0.0],
            ],
            None,
            CouplingModel::WeakJ,
        )
        .unwrap();
        let tp = ThermalParams::new(11.74, 300.0, vec![42.577e6, 40.05e6, 10.708e6]).unwrap();
        let rho = thermal_state(&sys, &tp, ThermalMode::HighTemperature).unwrap();
        let (progs, avg) = pseudo_pure_temporal(&sys, &rho).unwrap();
        assert_eq!(progs.len(), 7);
        let p = avg.populations();
        for w in p.iter().skip(2) {
            assert!((w - p[1]).abs() < 1e-8, "populations {p:?}");
        }
        assert!(p[0] > p[1]);

        // maximally mixed input is a fixed point with α = 0
        let mm = State::maximally_mixed(3);
        let (_, avg_mm) = pseudo_pure_temporal(&sys, &mm).unwrap();
        assert!((avg_mm.matrix - mm.matrix).norm() < 1e-10);
    }

    #[test]
    fn pseudo_pure_rejects_large_systems_and_coherent_inputs() {
        let sys = SpinSystem::uncoupled(4, 0.0);
        let mm = State::maximally_mixed(4);
        assert!(pseudo_pure_temporal(&sys, &mm).is_err());

        let sys2 = weak2(100.0, 0.0, 0.0);
        let plus = State::new(
            identity(4) * c64(0.25, 0.0) + spin_op(2, 1, Axis::X).unwrap() * c64(0.5, 0.0),
            StateKind::Mixed,
        )
        .unwrap();
        assert!(pseudo_pure_temporal(&sys2, &plus).is_err());
    }

    #[test]
    fn trajectory_sampling_covers_delays() {
        let sys = SpinSystem::uncoupled(1, 50.0);
        let plus = State::new(
            identity(2) * c64(0.5, 0.0) + spin_op(1, 1, Axis::X).unwrap(),
            StateKind::Pure,
        )
        .unwrap();
        let prog = PulseProgram::new(vec![Event::Delay(10.0e-3)]);
        let ix = spin_op(1, 1, Axis::X).unwrap();
        let traj =
            run_program_trajectory(&prog, &sys, &plus, PulseMode::Ideal, &[ix], Some(1.0e-3))
                .unwrap();
        assert_eq!(traj.len(), 11);
        for p in &traj {
            let want = 0.5 * (2.0 * PI * 50.0 * p.t_s).cos();
            assert!((p.values[0].re - want).abs() < 1e-9);
        }
    }
}
