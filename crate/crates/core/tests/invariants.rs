mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schurhorn::error::Error;
use schurhorn::graphs::*;
use schurhorn::invariants::*;

fn eigenspace_from_basis(q: &DMatrix<f64>) -> Eigenspace {
    Eigenspace::new(sym(projector_from_basis(q)), 0.0).unwrap()
}

fn random_basis(rng: &mut impl Rng, k: usize, d: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(k, d, |_, _| rng.random_range(-1.0..1.0));
    g.qr().q().columns(0, d).into_owned()
}

/// Smallest singular principal minor size minus one, by full enumeration.
fn brute_krank(p: &DMatrix<f64>, tol: f64) -> usize {
    let k = p.nrows();
    let mut best = k;
    for omega in subsets_up_to(k, k) {
        if omega.is_empty() || omega.len() > best {
            continue;
        }
        let minor = DMatrix::from_fn(omega.len(), omega.len(), |a, b| p[(omega[a], omega[b])]);
        if ref_lambda_min(&minor) <= tol {
            best = best.min(omega.len() - 1);
        }
    }
    best
}

/// Correlation matrix by bitmask enumeration and KKT completions.
fn ref_correlation(q: &DMatrix<f64>, ell: usize, p: f64) -> DMatrix<f64> {
    let k = q.nrows();
    let mut sigma = DMatrix::zeros(k, k);
    let mut mass = 0.0;
    for omega in subsets_up_to(k, ell) {
        let w = p.powi(omega.len() as i32) * (1.0 - p).powi((k - omega.len()) as i32);
        mass += w;
        let x = kkt_min_norm(q, &omega);
        sigma += &x * x.transpose() * w;
    }
    sigma / mass
}

#[test]
fn q_omega_matches_kkt_on_graph_eigenspaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (g, lam) in [(gen_clebsch(), 1.0), (gen_kneser(5, 2).unwrap(), 1.0), (gen_clique(7).unwrap(), -1.0)] {
        let a = adjacency(&g);
        let basis = ref_eigenspace_basis(&a, lam);
        let e = Eigenspace::of_graph(&g, lam).unwrap();
        let kr = kruskal_rank(&e, g.n()).unwrap().lower;
        for _ in 0..30 {
            let size = rng.random_range(0..=kr);
            let mut omega: Vec<usize> = (0..g.n()).collect();
            use rand::seq::SliceRandom;
            omega.shuffle(&mut rng);
            omega.truncate(size);
            let got = q_omega(&e, &omega).unwrap();
            let want = kkt_min_norm(&basis, &omega);
            assert!((&got - &want).norm() < 1e-9);
            for &i in &omega {
                assert!((got[i] - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn kruskal_rank_matches_enumeration() {
    let cases: Vec<(Graph, f64)> = vec![
        (gen_clique(6).unwrap(), -1.0),
        (gen_kneser(5, 2).unwrap(), 1.0),
        (gen_kneser(5, 2).unwrap(), -2.0),
        (gen_paley(13).unwrap(), (13f64.sqrt() - 1.0) / 2.0),
        (gen_hypercube(3).unwrap(), 1.0),
        (gen_hamming(2, 3).unwrap(), 1.0),
        (gen_triangular(5).unwrap(), -2.0),
    ];
    for (g, lam) in cases {
        let e = Eigenspace::of_graph(&g, lam).unwrap();
        let ours = kruskal_rank(&e, g.n()).unwrap();
        let want = brute_krank(e.projector().as_matrix(), e.singularity_tol());
        assert_eq!(ours.lower, want, "{} vertices, λ = {lam}", g.n());
        assert!(ours.exact);
    }
}

#[test]
fn kruskal_rank_cap_is_inexact() {
    let e = Eigenspace::of_graph(&gen_clebsch(), 1.0).unwrap();
    let kr = kruskal_rank(&e, 3).unwrap();
    assert_eq!(kr.lower, 3);
    assert!(!kr.exact);
}

#[test]
fn zeta_matches_enumeration() {
    let g = gen_kneser(5, 2).unwrap();
    let e = Eigenspace::of_graph(&g, 1.0).unwrap();
    let p = e.projector().as_matrix().clone();
    for ell in 1..=4 {
        let want = subsets_up_to(10, ell)
            .into_iter()
            .filter(|o| !o.is_empty())
            .map(|o| ref_lambda_min(&DMatrix::from_fn(o.len(), o.len(), |a, b| p[(o[a], o[b])])))
            .fold(f64::INFINITY, f64::min);
        assert!((zeta(&e, ell).unwrap() - want).abs() < 1e-10);
    }
}

#[test]
fn exact_width_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (g, lam) in [(gen_clique(5).unwrap(), -1.0), (gen_kneser(5, 2).unwrap(), 1.0)] {
        let basis = ref_eigenspace_basis(&adjacency(&g), lam);
        let e = Eigenspace::of_graph(&g, lam).unwrap();
        for ell in [1, 2, 3] {
            let p = rng.random_range(0.02..0.3);
            let got = correlation_matrix_exact(&e, ell, p).unwrap();
            let want = ref_correlation(&basis, ell, p);
            assert!((got.as_matrix() - &want).norm() < 1e-10);
            let w = comb_width(&e, ell, p, WidthMode::Exact).unwrap();
            assert!((w.value - ref_eigenvalues(&want)[0]).abs() < 1e-10);
        }
    }
}

#[test]
fn monte_carlo_width_agrees_with_exact() {
    let e = Eigenspace::of_graph(&gen_clique(4).unwrap(), -1.0).unwrap();
    let exact = comb_width(&e, 2, 0.1, WidthMode::Exact).unwrap();
    let mc = comb_width(&e, 2, 0.1, WidthMode::MonteCarlo { samples: 100_000, seed: 11 }).unwrap();
    assert!(mc.std_error > 0.0);
    assert!((mc.value - exact.value).abs() <= 3.0 * mc.std_error, "{mc:?} vs {exact:?}");
    let again = comb_width(&e, 2, 0.1, WidthMode::MonteCarlo { samples: 100_000, seed: 11 }).unwrap();
    assert_eq!(mc, again);
}

#[test]
fn width_budget_and_rejection_cap() {
    let e = Eigenspace::of_graph(&gen_triangular(9).unwrap(), -2.0).unwrap();
    assert!(matches!(
        correlation_matrix_exact_with_budget(&e, 7, 0.1, 1000),
        Err(Error::Budget { .. })
    ));
    let small = Eigenspace::of_graph(&gen_clique(20).unwrap(), -1.0).unwrap();
    // |Ω| ≤ 1 is almost never drawn at p = 0.9
    assert!(comb_width(&small, 1, 0.9, WidthMode::MonteCarlo { samples: 40, seed: 0 }).is_err());
}

#[test]
fn coherence_bounds_kruskal_rank() {
    for (g, lam) in [
        (gen_clebsch(), 1.0),
        (gen_clebsch(), -3.0),
        (gen_kneser(6, 2).unwrap(), 1.0),
        (gen_paley(13).unwrap(), (13f64.sqrt() - 1.0) / 2.0),
    ] {
        let e = Eigenspace::of_graph(&g, lam).unwrap();
        let mu = coherence(&e).unwrap();
        let kr = kruskal_rank(&e, g.n()).unwrap();
        assert!(kr.lower as f64 >= 1.0 / mu - 1e-9);
        assert!(krank_lower_from_coherence(mu) <= kr.lower);
    }
}

#[test]
fn invariant_report_fields() {
    let r = invariant_report(&gen_clebsch(), 1.0, None, 0.05, None, None).unwrap();
    assert_eq!(r.dim, 10);
    assert_eq!(r.krank, 5);
    assert_eq!(r.ell, 3);
    assert!((r.eigengap - 4.0).abs() < 1e-9);
    let json = serde_json::to_value(&r).unwrap();
    for key in ["mu", "krank", "zeta", "omega", "eigengap", "lambda_E", "dim"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_omega_matches_kkt_on_random_subspaces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(3..10);
        let d = rng.random_range(2..k);
        let basis = random_basis(&mut rng, k, d);
        let e = eigenspace_from_basis(&basis);
        let size = rng.random_range(0..d);
        let omega: Vec<usize> = rand::seq::index::sample(&mut rng, k, size).into_vec();
        let minor_ok = omega.is_empty() || {
            let p = e.projector().as_matrix();
            ref_lambda_min(&DMatrix::from_fn(size, size, |a, b| p[(omega[a], omega[b])])) > 1e-3
        };
        prop_assume!(minor_ok);
        let got = q_omega(&e, &omega).unwrap();
        let want = kkt_min_norm(&basis, &omega);
        prop_assert!((&got - &want).norm() < 1e-8 * want.norm().max(1.0));
        // lies in E
        let pe = e.projector().as_matrix();
        prop_assert!((pe * &got - &got).norm() < 1e-9 * got.norm().max(1.0));
    }

    #[test]
    fn interlacing_makes_zeta_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = random_basis(&mut rng, 8, 5);
        let e = eigenspace_from_basis(&basis);
        let mut prev = f64::INFINITY;
        for ell in 1..=6 {
            let z = zeta(&e, ell).unwrap();
            prop_assert!(z <= prev + 1e-12);
            prev = z;
        }
        prop_assert!(prev.abs() < 1e-9);
    }
}

/// Next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(pos) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[pos] += 1;
    for i in (pos + 1)..k {
        c[i] = c[i - 1] + 1;
    }
    true
}

/// Smallest eigenvalue bound check of every `size`-minor containing `first`
/// as its least index: Cholesky of `P_SS − τI`.
fn all_minors_above(p: &DMatrix<f64>, size: usize, tau: f64) -> bool {
    use rayon::prelude::*;
    let k = p.nrows();
    (0..=(k - size)).into_par_iter().all(|first| {
        let mut rest: Vec<usize> = ((first + 1)..(first + size)).collect();
        loop {
            let idx: Vec<usize> = std::iter::once(first).chain(rest.iter().copied()).collect();
            let m = DMatrix::from_fn(size, size, |a, b| p[(idx[a], idx[b])] - if a == b { tau } else { 0.0 });
            if m.cholesky().is_none() {
                return false;
            }
            // combinations of the remaining indices drawn from first+1..k
            let mut shifted: Vec<usize> = rest.iter().map(|v| v - first - 1).collect();
            if !next_combination(&mut shifted, k - first - 1) {
                return true;
            }
            rest = shifted.iter().map(|v| v + first + 1).collect();
        }
    })
}

#[test]
fn gq24_kruskal_rank_by_independent_enumeration() {
    // every 10-minor of the projector onto the eigenvalue-1 space is
    // positive definite, and an 11-minor is singular, so the rank is 10
    let g = gen_gq24();
    let basis = ref_eigenspace_basis(&adjacency(&g), 1.0);
    assert_eq!(basis.ncols(), 20);
    let p = projector_from_basis(&basis);
    assert!(all_minors_above(&p, 10, 1e-6));
    let e = Eigenspace::of_graph(&g, 1.0).unwrap();
    let kr = kruskal_rank(&e, 27).unwrap();
    assert_eq!((kr.lower, kr.exact), (10, true));
    // witness: a vector of E⊥ supported on 11 vertices
    let mut c: Vec<usize> = (0..11).collect();
    let mut witness = None;
    loop {
        let m = DMatrix::from_fn(11, 11, |a, b| p[(c[a], c[b])]);
        if ref_lambda_min(&m) < 1e-9 {
            witness = Some(c.clone());
            break;
        }
        if !next_combination(&mut c, 27) {
            break;
        }
    }
    assert!(witness.is_some());
}
