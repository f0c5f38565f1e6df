//! Simulating a truncated harmonic oscillator on two spins: diagonal
//! frame-z evolutions reproduce the ladder phases, so superpositions of
//! |n⟩ levels beat at multiples of the oscillator frequency.

use serde_json::Map;

fn main() -> nmrsim::Result<()> {
    let out = std::env::temp_dir().join("nmrsim-qho");
    let metrics = nmrsim::experiments::run("qho", &Map::new(), 0, &out)?;
    let oracle = &metrics["encoding_oracle"];
    println!("encoding-convention oracle:");
    for row in oracle["table"].as_array().unwrap() {
        println!(
            "  {}  max phase deviation {:.2}",
            row["convention"].as_str().unwrap(),
            row["max_phase_deviation"].as_f64().unwrap()
        );
    }
    println!("resolution: {}\n", oracle["resolution"].as_str().unwrap());
    for s in metrics["states"].as_array().unwrap() {
        println!(
            "{:22} Ω: {:5.3}  2Ω: {:5.3}  3Ω: {:5.3}  (max excursion {:.2e})",
            s["state"].as_str().unwrap(),
            s["energy_fraction_omega"].as_f64().unwrap(),
            s["energy_fraction_2omega"].as_f64().unwrap(),
            s["energy_fraction_3omega"].as_f64().unwrap(),
            s["max_excursion"].as_f64().unwrap(),
        );
    }
    println!("\ntime traces written under {}", out.display());
    Ok(())
}
