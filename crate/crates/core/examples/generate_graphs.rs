//! Builds every graph family, prints its grouped spectrum and writes one of
//! them as an edge list.
//!
//! ```text
//! cargo run --example generate_graphs
//! ```

use schurhorn::graphs::{gen_hypercube, load_graph, save_graph};
use schurhorn::harness::FamilySpec;
use schurhorn::spectral::{eig_sym, DEFAULT_GROUP_TOL};

fn main() -> schurhorn::Result<()> {
    let families = [
        FamilySpec::Clique { k: 8 },
        FamilySpec::Triangular { m: 8 },
        FamilySpec::Kneser { m: 6, l: 2 },
        FamilySpec::Paley { q: 13 },
        FamilySpec::Clebsch,
        FamilySpec::Gq24,
        FamilySpec::Hamming { d: 2, q: 4 },
        FamilySpec::Hypercube { d: 4 },
    ];
    for family in &families {
        let g = family.build()?;
        let d = eig_sym(&g.adjacency(), DEFAULT_GROUP_TOL)?;
        let spectrum: Vec<String> = d
            .distinct_values
            .iter()
            .zip(&d.multiplicities)
            .map(|(v, m)| format!("{v:.4} [x{m}]"))
            .collect();
        println!("{:<12} k={:<3} edges={:<4} {}", family.label(), g.n(), g.edge_count(), spectrum.join(", "));
    }

    let dir = std::env::temp_dir().join("schurhorn-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("q4.txt");
    let cube = gen_hypercube(4)?;
    save_graph(&cube, &path)?;
    assert_eq!(load_graph(&path)?, cube);
    println!("wrote {}", path.display());
    Ok(())
}
