//! Desk-scale simulator of liquid- and solid-state NMR quantum information
//! processing.
//!
//! The crate builds spin Hamiltonians for molecules described as systems of
//! N spin-1/2 nuclei, executes pulse programs (RF pulses, delays, frame
//! rotations) as unitary, ensemble-averaged or relaxing dynamics, prepares
//! pseudo-pure states by temporal averaging, reads out free-induction decays
//! and spectra, and ships a set of canned experiments (composite-pulse
//! robustness, Carr-Purcell echoes, a truncated-oscillator simulation,
//! factoring 15 on seven spins, kick-model decoherence, multiple-quantum
//! coherence growth).
//!
//! Conventions used throughout:
//!
//! * spin 1 occupies the leftmost tensor factor; the basis state
//!   |q1 q2 … qN⟩ has index q1·2^(N−1) + … + qN;
//! * |0⟩ ≡ |↑⟩ with I_z|0⟩ = +½|0⟩;
//! * rotations are right-handed, R_n(θ) = exp(−iθ n·I);
//! * Hamiltonians are held internally in angular frequency (rad/s), all
//!   I/O is in Hz.
//!
//! Entry points: [`operators`] for the dense linear algebra, [`spin_system`]
//! for Hamiltonians and thermal states, [`sequence`] for pulse programs,
//! [`experiments`] for the canned runs. The `nmrsim` binary is a thin CLI
//! over [`experiments`]; the crate-level `examples/` directory shows one
//! runnable program per major capability.

pub mod circuits;
pub mod control;
pub mod experiments;
pub mod io;
pub mod operators;
pub mod optimize;
pub mod presets;
pub mod readout;
pub mod relaxation;
pub mod sequence;
pub mod spin_system;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("spin index {index} out of range 1..={n_spins}")]
    SpinOutOfRange { index: usize, n_spins: usize },
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid spin system: {0}")]
    InvalidSystem(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid pulse program: {0}")]
    InvalidProgram(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
