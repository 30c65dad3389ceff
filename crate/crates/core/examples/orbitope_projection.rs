//! Membership, projection and linear maximization over the Schur-Horn
//! orbitope of a padded clique, where the orbitope is the set of PSD
//! matrices with trace k.
//!
//! ```text
//! cargo run --example orbitope_projection
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schurhorn::graphs::gen_clique;
use schurhorn::orbitope::{contains, linmax_orbitope, make_orbitope, project_orbitope, project_spectrum};
use schurhorn::spectral::{eigh, SymmetricMatrix};

fn main() -> schurhorn::Result<()> {
    // K4 + I padded to 7 has spectrum (4, 0, ..., 0)
    let o = make_orbitope(&gen_clique(4)?, -1.0, 7)?;
    println!("spectrum {:?}, trace {}", o.spectrum(), o.trace());

    let w = [3.0, 1.5, 0.2, -0.1, -0.4, -1.0, -2.0];
    println!("spectrum projection of {w:?}: {:?}", project_spectrum(&w, o.spectrum())?);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = SymmetricMatrix::from_fn(7, |_, _| rng.random_range(-1.0..1.0));
    let px = project_orbitope(&o, &x)?;
    let ev = eigh(&px)?.values;
    println!("projection: trace {:.6}, min eigenvalue {:.2e}, member {}", px.trace(), ev[6], contains(&o, &px, 1e-9)?);
    println!("distance moved {:.4}", (&x - &px).frobenius_norm());

    let (value, argmax) = linmax_orbitope(&o, &x)?;
    println!("max <X, Z> over the orbitope = {value:.4} = 4 * lambda_max(X) = {:.4}", 4.0 * eigh(&x)?.values[0]);
    assert!(contains(&o, &argmax, 1e-9)?);
    Ok(())
}
