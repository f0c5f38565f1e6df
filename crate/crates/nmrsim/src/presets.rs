//! Bundled spin systems used by the experiments and the CLI.

use crate::spin_system::{CouplingModel, SpinSystem, ThermalParams};
use crate::{Error, Result};

/// Gyromagnetic ratio of ¹H as Larmor Hz per tesla.
pub const GAMMA_H: f64 = 42.577_478e6;
/// Gyromagnetic ratio of ¹³C.
pub const GAMMA_C: f64 = 10.708_4e6;
/// Gyromagnetic ratio of ¹⁹F.
pub const GAMMA_F: f64 = 40.078e6;

const SHOR7_JSON: &str = include_str!("../data/shor7_molecule.json");

pub fn names() -> Vec<&'static str> {
    vec![
        "chloroform",
        "three_spin",
        "five_spin",
        "seven_spin",
        "shor7",
        "dipolar_chain6",
    ]
}

/// Look a preset up by name.
pub fn by_name(name: &str) -> Result<SpinSystem> {
    match name {
        "chloroform" => Ok(chloroform()),
        "three_spin" => Ok(three_spin()),
        "five_spin" => Ok(five_spin()),
        "seven_spin" => Ok(seven_spin()),
        "shor7" => shor7(),
        "dipolar_chain6" => Ok(dipolar_chain(6, 120.0)),
        other => Err(Error::InvalidConfig(format!("unknown preset '{other}'"))),
    }
}

/// ¹H-¹³C pair with the 215 Hz one-bond coupling, both on resonance.
pub fn chloroform() -> SpinSystem {
    SpinSystem::new(
        vec!["H".into(), "C".into()],
        vec![0.0, 0.0],
        vec![vec![0.0, 215.0], vec![215.0, 0.0]],
        None,
        CouplingModel::WeakJ,
    )
    .expect("static preset")
}

/// Thermal parameters matching [`chloroform`] at 11.74 T and 300 K.
pub fn chloroform_thermal() -> ThermalParams {
    ThermalParams::new(11.74, 300.0, vec![GAMMA_H, GAMMA_C]).expect("static preset")
}

/// Fully coupled three-spin system, on resonance.
pub fn three_spin() -> SpinSystem {
    SpinSystem::new(
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
    .expect("static preset")
}

// Pair couplings b·2^((i+j) mod n) (0-based) give every spin a binary-
// scaled coupling set: all 2^(n−1) line positions on each channel are
// distinct, with a minimum gap of b Hz.
fn generic_weak(n: usize, b: f64, offsets: Vec<f64>) -> SpinSystem {
    let mut j = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in (i + 1)..n {
            let e = (i + k) % n;
            j[i][k] = b * (1u32 << e) as f64;
            j[k][i] = j[i][k];
        }
    }
    SpinSystem::new(
        (1..=n).map(|k| format!("S{k}")).collect(),
        offsets,
        j,
        None,
        CouplingModel::WeakJ,
    )
    .expect("static preset")
}

/// Generic five-spin system: 16 resolved lines per channel.
pub fn five_spin() -> SpinSystem {
    generic_weak(5, 4.0, vec![0.0, 600.0, -500.0, 1300.0, -1100.0])
}

/// Generic seven-spin system: 64 resolved lines per channel.
pub fn seven_spin() -> SpinSystem {
    generic_weak(7, 2.0, vec![0.0, 800.0, -650.0, 1500.0, -1250.0, 2200.0, -1900.0])
}

/// The bundled seven-spin factoring molecule (five ¹⁹F, two ¹³C).
pub fn shor7() -> Result<SpinSystem> {
    serde_json::from_str(SHOR7_JSON).map_err(Error::from)
}

/// Homonuclear chain with dipolar couplings d/|i−j|³.
pub fn dipolar_chain(n: usize, d_hz: f64) -> SpinSystem {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in (i + 1)..n {
            d[i][k] = d_hz / ((k - i) as f64).powi(3);
            d[k][i] = d[i][k];
        }
    }
    SpinSystem::new(
        (1..=n).map(|k| format!("S{k}")).collect(),
        vec![0.0; n],
        vec![vec![0.0; n]; n],
        Some(d),
        CouplingModel::DipolarTruncated,
    )
    .expect("static preset")
}
