//! Evaluates the recovery threshold on n and the failure probabilities for
//! the Clebsch graph, then the closed-form version for growing cliques.
//!
//! ```text
//! cargo run --example theorem_bounds
//! ```

use schurhorn::certificate::{bounds_from_invariants, clique_inputs, corollary_bounds, theorem_bounds};
use schurhorn::graphs::gen_clebsch;
use schurhorn::invariants::{Eigenspace, WidthMode};

fn main() -> schurhorn::Result<()> {
    let g = gen_clebsch();
    let e = Eigenspace::of_graph(&g, 1.0)?;
    for p in [0.01, 0.02, 0.05] {
        let exact = theorem_bounds(&g, &e, 18, p, 3, 1.0, WidthMode::Exact)?;
        let closed = corollary_bounds(&g, &e, 18, p, 1.0)?;
        println!(
            "Clebsch p={p}: n < {:.2} (width {:.4}), closed form n < {:.2}; p1={:.3} p2={:.3} clamped={}",
            exact.n_threshold, exact.omega, closed.n_threshold, exact.p1, exact.p2, exact.clamped
        );
    }

    let p = 0.1;
    for k in [20usize, 40, 80, 160] {
        let c1sq = 9.0 * p / (1.0 - p);
        let mu = 1.0 / (k - 1) as f64;
        let n = ((k * k) as f64 / 32.0 * ((1.0 - k as f64 * p * mu) / (2.0 * p)).min(1.0 / c1sq)) as usize + k;
        let r = bounds_from_invariants(&clique_inputs(k, n, p, 1.0)?)?;
        println!(
            "clique k={k:>3} n={n:>4}: threshold {:>7.1}, p1 {:.3e}, p2 {:.3e}, success >= {:.4}",
            r.n_threshold, r.p1_raw, r.p2_raw, r.success_lower_bound
        );
    }
    Ok(())
}
