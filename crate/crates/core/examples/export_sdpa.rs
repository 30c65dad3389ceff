//! Writes the relaxation of a small planted instance in SDPA sparse format.
//!
//! ```text
//! cargo run --example export_sdpa
//! ```

use schurhorn::graphs::gen_kneser;
use schurhorn::harness::plant;
use schurhorn::sdpa::{export_sdpa, render_sdpa, sdpa_blocks};

fn main() -> schurhorn::Result<()> {
    // Petersen graph among 14 vertices
    let inst = plant(&gen_kneser(5, 2)?, 14, 0.2, 3)?;
    for (lam, mult) in sdpa_blocks(&inst, 1.0)? {
        println!("block: eigenvalue {lam:>5.2}, trace {mult}");
    }
    let text = render_sdpa(&inst, 1.0)?;
    println!("{} constraints, {} lines", text.lines().next().unwrap_or("0"), text.lines().count());
    let path = std::env::temp_dir().join("petersen14.dat-s");
    export_sdpa(&inst, 1.0, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
