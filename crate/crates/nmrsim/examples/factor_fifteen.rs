//! Factoring 15 with base 7 on seven spins: Hadamards on the three-qubit
//! register, two controlled modular multiplications on the four-qubit work
//! register, an inverse Fourier transform and diagonal readout.

use serde_json::Map;

fn main() -> nmrsim::Result<()> {
    let out = std::env::temp_dir().join("nmrsim-shor15");
    let metrics = nmrsim::experiments::run("shor15", &Map::new(), 0, &out)?;
    println!("register distribution (values 0..7):");
    for (v, p) in metrics["register_distribution"]
        .as_array()
        .unwrap()
        .iter()
        .enumerate()
    {
        let p = p.as_f64().unwrap();
        let bar = "#".repeat((p * 40.0).round() as usize);
        println!("  {v}: {p:6.4} {bar}");
    }
    println!(
        "work-register orbit after modular exponentiation: {:?}",
        metrics["work_orbit"]
    );
    println!(
        "recovered period {} → factors {:?}",
        metrics["period"], metrics["factors"]
    );
    println!("result files under {}", out.display());
    Ok(())
}
