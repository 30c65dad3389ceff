//! Spectral decompositions and comonotonicity: a nondecreasing function of
//! a matrix shares its sorted eigenbasis, a decreasing one does not.
//!
//! ```text
//! cargo run --example spectral_comonotone
//! ```

use schurhorn::graphs::gen_clebsch;
use schurhorn::spectral::{
    comonotone_margin, eig_sym, eigengap, eigh, is_spectrally_comonotone, is_strictly_spectrally_comonotone,
    SymmetricMatrix, DEFAULT_GROUP_TOL,
};

fn main() -> schurhorn::Result<()> {
    let a = gen_clebsch().adjacency();
    let d = eig_sym(&a, DEFAULT_GROUP_TOL)?;
    for (i, (v, m)) in d.distinct_values.iter().zip(&d.multiplicities).enumerate() {
        println!("eigenvalue {v:>5.2}  multiplicity {m:>2}  eigengap {:.2}", eigengap(&d, i)?);
    }

    // functions applied through one eigenbasis of A
    let e = eigh(&a)?;
    let apply = |f: fn(f64) -> f64| {
        let values: Vec<f64> = e.values.iter().map(|&v| f(v)).collect();
        SymmetricMatrix::from_eigen(&e.vectors, &values)
    };
    // v ↦ max(v, 1) merges the two lower blocks, v ↦ v³ keeps them apart
    let clipped = apply(|v| v.max(1.0));
    let cube = apply(|v| v * v * v);
    let shifted = &a - &SymmetricMatrix::identity(16).scale(1.0);
    println!("max(A, I) comonotone with A: {}", is_spectrally_comonotone(&clipped, &a, 1e-9)?);
    println!("max(A, I) strictly comonotone with A: {}", is_strictly_spectrally_comonotone(&clipped, &a, 1e-6, 1e-9)?);
    println!("A^3 strictly comonotone with A: {}", is_strictly_spectrally_comonotone(&cube, &a, 1e-6, 1e-9)?);
    println!("-A comonotone with A: {}", is_spectrally_comonotone(&a.scale(-1.0), &a, 1e-9)?);
    println!("margin of A - I against A: {:?}", comonotone_margin(&shifted, &a, 1e-9)?);
    Ok(())
}
