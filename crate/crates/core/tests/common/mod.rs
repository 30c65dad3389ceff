//! Reference computations shared by the integration tests. Nothing here
//! calls the library's numerical routines: eigenvalues come from
//! nalgebra's solver, minimum-norm completions from a dense KKT solve and
//! projections from active-set enumeration.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use schurhorn::graphs::Graph;
use schurhorn::spectral::SymmetricMatrix;

/// Eigenvalues in decreasing order.
pub fn ref_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Eigenvalues and eigenvectors, columns ordered by decreasing eigenvalue.
pub fn ref_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

pub fn ref_lambda_min(m: &DMatrix<f64>) -> f64 {
    *ref_eigenvalues(m).last().unwrap()
}

/// Groups sorted values that differ by at most `tol` into (mean, count).
pub fn group(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut sum = 0.0;
    let mut start = 0;
    for i in 0..values.len() {
        if i > start && (values[i] - values[i - 1]).abs() > tol {
            out.push((sum / (i - start) as f64, i - start));
            sum = 0.0;
            start = i;
        }
        sum += values[i];
    }
    if !values.is_empty() {
        out.push((sum / (values.len() - start) as f64, values.len() - start));
    }
    out
}

pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    DMatrix::from_fn(g.n(), g.n(), |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 })
}

/// Orthonormal basis (columns) of the eigenspace of `a` nearest `lambda`.
pub fn ref_eigenspace_basis(a: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let (vals, vecs) = ref_eigh(a);
    let cols: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i] - lambda).abs() < 1e-6).collect();
    assert!(!cols.is_empty(), "no eigenvalue near {lambda}");
    DMatrix::from_fn(a.nrows(), cols.len(), |r, c| vecs[(r, cols[c])])
}

pub fn projector_from_basis(q: &DMatrix<f64>) -> DMatrix<f64> {
    q * q.transpose()
}

/// Minimum-norm `x` with `x ∈ range(Q)` and `x_Ω = 1`, from the KKT
/// system of `min ‖c‖²` s.t. `Q_Ω c = 1`.
pub fn kkt_min_norm(q: &DMatrix<f64>, omega: &[usize]) -> DVector<f64> {
    let (k, d) = q.shape();
    let m = omega.len();
    if m == 0 {
        return DVector::zeros(k);
    }
    let mut kkt = DMatrix::zeros(d + m, d + m);
    for i in 0..d {
        kkt[(i, i)] = 2.0;
    }
    for (a, &row) in omega.iter().enumerate() {
        for c in 0..d {
            kkt[(d + a, c)] = q[(row, c)];
            kkt[(c, d + a)] = q[(row, c)];
        }
    }
    let mut rhs = DVector::zeros(d + m);
    for a in 0..m {
        rhs[d + a] = 1.0;
    }
    let sol = kkt.lu().solve(&rhs).expect("KKT system is nonsingular");
    q * sol.rows(0, d)
}

/// All subsets of `0..k` as bitmask-derived index lists, sizes `0..=max`.
pub fn subsets_up_to(k: usize, max: usize) -> Vec<Vec<usize>> {
    assert!(k < 31);
    (0u32..(1 << k))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..k).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

/// Euclidean projection of a descending `w` onto the permutahedron of a
/// descending `lam`, by enumerating which prefix constraints are tight.
/// Each choice fixes block sums; within a block `y = w + const`. The
/// feasible candidate nearest `w` is returned.
pub fn active_set_projection(w: &[f64], lam: &[f64]) -> Vec<f64> {
    let n = w.len();
    let prefix = |v: &[f64], l: usize| v[..l].iter().sum::<f64>();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut cuts: Vec<usize> = (1..n).filter(|&c| mask & (1 << (c - 1)) != 0).collect();
        cuts.insert(0, 0);
        cuts.push(n);
        let mut y = vec![0.0; n];
        for b in cuts.windows(2) {
            let (s, e) = (b[0], b[1]);
            let target = prefix(lam, e) - prefix(lam, s);
            let have: f64 = w[s..e].iter().sum();
            let shift = (target - have) / (e - s) as f64;
            for i in s..e {
                y[i] = w[i] + shift;
            }
        }
        let mut sorted = y.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let feasible = (1..n).all(|l| prefix(&sorted, l) <= prefix(lam, l) + 1e-10);
        if !feasible {
            continue;
        }
        let dist: f64 = y.iter().zip(w).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, y));
        }
    }
    best.expect("the tight-everywhere choice is always feasible").1
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale));
    m = (&m + m.transpose()) * 0.5;
    m
}

pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    g.qr().q()
}

pub fn sym(m: DMatrix<f64>) -> SymmetricMatrix {
    SymmetricMatrix::from_upper(m).unwrap()
}

pub fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}
