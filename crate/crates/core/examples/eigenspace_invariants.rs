//! Coherence, Kruskal rank, ζ and the combinatorial width of the largest
//! eigenspace of each graph in the phase-transition table.
//!
//! ```text
//! cargo run --example eigenspace_invariants
//! ```

use schurhorn::graphs::{gen_clebsch, gen_gq24, gen_triangular};
use schurhorn::harness::gamma_policy;
use schurhorn::invariants::{comb_width, invariant_report, q_omega, Eigenspace, WidthMode};

fn main() -> schurhorn::Result<()> {
    let p = 0.05;
    for (name, g) in [("Clebsch", gen_clebsch()), ("GQ(2,4)", gen_gq24()), ("T_8", gen_triangular(8)?)] {
        let lambda = gamma_policy(&g)?;
        let r = invariant_report(&g, lambda, None, p, Some(50_000), None)?;
        println!(
            "{name:<8} lambda={:>5.2} dim={:>2} mu={:.4} krank={}{} ell={} zeta={:.4} omega={:.4} (+/- {:.1e}) eigengap={:.2}",
            r.lambda_e,
            r.dim,
            r.mu,
            r.krank,
            if r.krank_exact { "" } else { "+" },
            r.ell,
            r.zeta,
            r.omega,
            r.std_error,
            r.eigengap
        );
    }

    let g = gen_clebsch();
    let e = Eigenspace::of_graph(&g, 1.0)?;
    let q = q_omega(&e, &[0, 1, 2])?;
    println!("q_Omega for Omega = {{0,1,2}}: norm {:.4}, entries {:.3?}", q.norm(), &q.as_slice()[..4]);
    let exact = comb_width(&e, 3, p, WidthMode::Exact)?;
    let mc = comb_width(&e, 3, p, WidthMode::MonteCarlo { samples: 100_000, seed: 7 })?;
    println!("width exact {:.5}, sampled {:.5} +/- {:.5}", exact.value, mc.value, mc.std_error);
    Ok(())
}
