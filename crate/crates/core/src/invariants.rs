//! Invariants of a graph eigenspace that govern recovery: coherence,
//! Kruskal rank, the minimum principal-minor eigenvalue ζ, minimum-norm
//! completions `q_Ω` and the combinatorial width ω.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{binomial, Graph};
use crate::spectral::{eig_sym, eigengap, eigh, SpectralDecomposition, SymmetricMatrix, DEFAULT_GROUP_TOL};

/// Enumeration budget for exact ζ and exact width.
pub const DEFAULT_SUBSET_BUDGET: u128 = 5_000_000;

/// Draws per Monte Carlo sample before giving up on `|Ω| ≤ ℓ`.
const MAX_RESAMPLES: usize = 100;

/// Jackknife groups for Monte Carlo width estimates.
const MC_BLOCKS: u64 = 20;

/// An eigenspace `E` of a symmetric `k × k` matrix with eigenvalue `λ_E`.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    projector: SymmetricMatrix,
    lambda: f64,
    dim: usize,
}

impl Eigenspace {
    /// Wraps a projector; `dim` is its rounded trace.
    pub fn new(projector: SymmetricMatrix, lambda: f64) -> Result<Self> {
        let k = projector.dim();
        let sq = SymmetricMatrix::symmetrize(projector.as_matrix() * projector.as_matrix());
        let err = (&sq - &projector).frobenius_norm();
        if err > 1e-8 * (k.max(1) as f64) {
            return Err(Error::invalid(format!("not a projector: ‖P² − P‖_F = {err:e}")));
        }
        let dim = projector.trace().round() as usize;
        Ok(Self {
            projector,
            lambda,
            dim,
        })
    }

    pub fn from_decomposition(d: &SpectralDecomposition, index: usize) -> Result<Self> {
        let projector = d
            .projectors
            .get(index)
            .ok_or_else(|| Error::invalid(format!("eigenspace index {index} out of range")))?
            .clone();
        Ok(Self {
            projector,
            lambda: d.distinct_values[index],
            dim: d.multiplicities[index],
        })
    }

    /// Eigenspace of the adjacency matrix of `g` for `eigenvalue`.
    pub fn of_graph(g: &Graph, eigenvalue: f64) -> Result<Self> {
        let d = eig_sym(&g.adjacency(), DEFAULT_GROUP_TOL)?;
        let idx = d
            .nearest(eigenvalue)
            .ok_or_else(|| Error::invalid("graph has no vertices"))?;
        if (d.distinct_values[idx] - eigenvalue).abs() > 1e-6 * d.distinct_values[idx].abs().max(1.0) {
            return Err(Error::invalid(format!(
                "{eigenvalue} is not an eigenvalue (nearest is {})",
                d.distinct_values[idx]
            )));
        }
        Self::from_decomposition(&d, idx)
    }

    pub fn projector(&self) -> &SymmetricMatrix {
        &self.projector
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient dimension `k`.
    pub fn ambient(&self) -> usize {
        self.projector.dim()
    }

    /// Threshold below which a principal minor counts as singular.
    pub fn singularity_tol(&self) -> f64 {
        1e-9 * self.dim as f64 / self.ambient().max(1) as f64
    }
}

/// `max_{i≠j} |P_ij| / sqrt(P_ii P_jj)`.
pub fn coherence(e: &Eigenspace) -> Result<f64> {
    let p = e.projector();
    let k = p.dim();
    for i in 0..k {
        if p.get(i, i) <= 1e-12 {
            return Err(Error::DegenerateEigenspace {
                index: i,
                value: p.get(i, i),
            });
        }
    }
    let mut mu = 0.0_f64;
    for i in 0..k {
        for j in (i + 1)..k {
            mu = mu.max(p.get(i, j).abs() / (p.get(i, i) * p.get(j, j)).sqrt());
        }
    }
    Ok(mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KruskalRank {
    pub lower: usize,
    /// False when the search stopped at the cap without finding a singular minor.
    pub exact: bool,
}

/// Depth-first search over index sets of size `m` in lexicographic order,
/// extending a Cholesky factor of `P − tol·I` one index at a time. Returns
/// the first set whose minor has `λ_min ≤ tol`.
fn first_singular_subset(p: &DMatrix<f64>, m: usize, tol: f64) -> Option<Vec<usize>> {
    let k = p.nrows();
    if m == 0 || m > k {
        return None;
    }
    (0..=(k - m)).into_par_iter().find_map_first(|first| {
        let mut search = MinorSearch::new(p, tol, m);
        search.descend(first)
    })
}

struct MinorSearch<'a> {
    p: &'a DMatrix<f64>,
    tol: f64,
    target: usize,
    chosen: Vec<usize>,
    // row-major lower-triangular factor, row d holds d+1 entries
    factor: Vec<Vec<f64>>,
}

impl<'a> MinorSearch<'a> {
    fn new(p: &'a DMatrix<f64>, tol: f64, target: usize) -> Self {
        Self {
            p,
            tol,
            target,
            chosen: Vec::with_capacity(target),
            factor: Vec::with_capacity(target),
        }
    }

    /// Tries to append index `j`; false if the enlarged minor fails.
    fn push(&mut self, j: usize) -> bool {
        let d = self.chosen.len();
        let mut row = Vec::with_capacity(d + 1);
        let mut sq = 0.0;
        for a in 0..d {
            let mut x = self.p[(self.chosen[a], j)];
            for b in 0..a {
                x -= self.factor[a][b] * row[b];
            }
            x /= self.factor[a][a];
            sq += x * x;
            row.push(x);
        }
        let pivot = self.p[(j, j)] - self.tol - sq;
        if pivot <= 0.0 {
            return false;
        }
        row.push(pivot.sqrt());
        self.factor.push(row);
        self.chosen.push(j);
        true
    }

    fn pop(&mut self) {
        self.chosen.pop();
        self.factor.pop();
    }

    fn descend(&mut self, j: usize) -> Option<Vec<usize>> {
        if !self.push(j) {
            let mut bad = self.chosen.clone();
            bad.push(j);
            return Some(bad);
        }
        let k = self.p.nrows();
        let depth = self.chosen.len();
        if depth < self.target {
            let remaining = self.target - depth;
            for next in (j + 1)..=(k - remaining) {
                if let Some(bad) = self.descend(next) {
                    return Some(bad);
                }
            }
        }
        self.pop();
        None
    }
}

/// Largest `m ≤ cap` such that every `m × m` principal minor of `P_E` has
/// `λ_min` above the singularity tolerance.
pub fn kruskal_rank(e: &Eigenspace, cap: usize) -> Result<KruskalRank> {
    let k = e.ambient();
    if cap > k {
        return Err(Error::invalid(format!("cap {cap} exceeds ambient dimension {k}")));
    }
    let p = e.projector().as_matrix();
    let tol = e.singularity_tol();
    let limit = cap.min(e.dim());
    for m in 1..=limit {
        if first_singular_subset(p, m, tol).is_some() {
            return Ok(KruskalRank {
                lower: m - 1,
                exact: true,
            });
        }
    }
    if limit == e.dim() {
        return Ok(KruskalRank {
            lower: limit,
            exact: true,
        });
    }
    Ok(KruskalRank {
        lower: limit,
        exact: false,
    })
}

/// Lower bound `ceil(1/μ)`-style: the largest integer `m ≤ 1/μ`.
pub fn krank_lower_from_coherence(mu: f64) -> usize {
    if mu <= 0.0 {
        usize::MAX
    } else {
        // tolerate rounding in 1/μ for exact reciprocals
        ((1.0 / mu) * (1.0 + 1e-12)).floor() as usize
    }
}

/// `min_{|Ω| ≤ ℓ} λ_min((P_E)_{Ω,Ω})`. By eigenvalue interlacing the
/// minimum is attained at `|Ω| = ℓ`.
pub fn zeta(e: &Eigenspace, ell: usize) -> Result<f64> {
    zeta_with_budget(e, ell, DEFAULT_SUBSET_BUDGET)
}

pub fn zeta_with_budget(e: &Eigenspace, ell: usize, budget: u128) -> Result<f64> {
    let k = e.ambient();
    if ell == 0 || ell > k {
        return Err(Error::invalid(format!("ell = {ell} outside 1..={k}")));
    }
    let required = binomial(k, ell);
    if required > budget {
        return Err(Error::Budget {
            required,
            limit: budget,
        });
    }
    let p = e.projector();
    let firsts: Vec<usize> = (0..=(k - ell)).collect();
    let mins = firsts
        .par_iter()
        .map(|&first| {
            let mut best = f64::INFINITY;
            let mut cur = vec![first];
            for_each_extension(&mut cur, k, ell, &mut |omega| {
                let minor = p.principal_submatrix(omega);
                let lam = eigh(&minor).map(|e| *e.values.last().unwrap()).unwrap_or(f64::NAN);
                best = best.min(lam);
            });
            best
        })
        .collect::<Vec<_>>();
    let z = mins.into_iter().fold(f64::INFINITY, f64::min);
    if z.is_nan() {
        return Err(Error::Numeric { iterations: 0 });
    }
    Ok(z)
}

/// Calls `f` on every size-`size` completion of the prefix `cur`
/// (lexicographic order).
fn for_each_extension(cur: &mut Vec<usize>, k: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    if cur.len() == size {
        f(cur);
        return;
    }
    let last = *cur.last().unwrap();
    let remaining = size - cur.len();
    for next in (last + 1)..=(k - remaining) {
        cur.push(next);
        for_each_extension(cur, k, size, f);
        cur.pop();
    }
}

/// Coefficients `x = ((P_E)_{Ω,Ω})^{-1} 1` of the completion in the
/// columns of `P_E` indexed by `Ω`.
fn completion_coefficients(e: &Eigenspace, omega: &[usize]) -> Result<DVector<f64>> {
    let minor = e.projector().principal_submatrix(omega);
    let lam_min = *eigh(&minor)?.values.last().unwrap();
    if lam_min <= e.singularity_tol() {
        return Err(Error::SingularMinor {
            indices: omega.to_vec(),
            lambda_min: lam_min,
        });
    }
    let chol = minor
        .into_matrix()
        .cholesky()
        .ok_or_else(|| Error::SingularMinor {
            indices: omega.to_vec(),
            lambda_min: lam_min,
        })?;
    Ok(chol.solve(&DVector::from_element(omega.len(), 1.0)))
}

/// Minimum Euclidean-norm vector in `E` equal to one on `Ω`:
/// `P_E I_Ω' ((P_E)_{Ω,Ω})^{-1} 1`.
pub fn q_omega(e: &Eigenspace, omega: &[usize]) -> Result<DVector<f64>> {
    let k = e.ambient();
    if let Some(&bad) = omega.iter().find(|&&i| i >= k) {
        return Err(Error::invalid(format!("index {bad} outside 0..{k}")));
    }
    let mut sorted = omega.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != omega.len() {
        return Err(Error::invalid("index set has repeated entries"));
    }
    if omega.is_empty() {
        return Ok(DVector::zeros(k));
    }
    let x = completion_coefficients(e, omega)?;
    let p = e.projector().as_matrix();
    let mut q = DVector::zeros(k);
    for (a, &i) in omega.iter().enumerate() {
        q.axpy(x[a], &p.column(i), 1.0);
    }
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WidthMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WidthEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub ell: usize,
    pub p: f64,
    pub exact: bool,
}

fn check_width_params(e: &Eigenspace, ell: usize, p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} outside [0, 1)")));
    }
    if ell > e.ambient() {
        return Err(Error::invalid(format!("ell = {ell} exceeds k = {}", e.ambient())));
    }
    Ok(())
}

/// Adds `w · x xᵀ` on the coordinates `omega` of `s`.
fn accumulate(s: &mut DMatrix<f64>, omega: &[usize], x: &DVector<f64>, w: f64) {
    for (a, &i) in omega.iter().enumerate() {
        for (b, &j) in omega.iter().enumerate() {
            s[(i, j)] += w * x[a] * x[b];
        }
    }
}

/// `E[q_Ω q_Ω' | |Ω| ≤ ℓ]` with `Ω` elementwise Bernoulli(`p`), by full
/// enumeration of the index sets of size at most `ℓ`.
pub fn correlation_matrix_exact(e: &Eigenspace, ell: usize, p: f64) -> Result<SymmetricMatrix> {
    correlation_matrix_exact_with_budget(e, ell, p, DEFAULT_SUBSET_BUDGET)
}

pub fn correlation_matrix_exact_with_budget(
    e: &Eigenspace,
    ell: usize,
    p: f64,
    budget: u128,
) -> Result<SymmetricMatrix> {
    check_width_params(e, ell, p)?;
    let k = e.ambient();
    let required: u128 = (0..=ell).map(|i| binomial(k, i)).sum();
    if required > budget {
        return Err(Error::Budget {
            required,
            limit: budget,
        });
    }
    let mass = |i: usize| p.powi(i as i32) * (1.0 - p).powi((k - i) as i32);
    let norm: f64 = (0..=ell).map(|i| binomial(k, i) as f64 * mass(i)).sum();

    // S accumulates I_Ω' x x' I_Ω; the correlation matrix is P S P.
    let mut s = DMatrix::zeros(k, k);
    for size in 1..=ell {
        let w = mass(size) / norm;
        if w == 0.0 {
            continue;
        }
        let firsts: Vec<usize> = (0..=(k - size)).collect();
        let parts = firsts
            .par_iter()
            .map(|&first| -> Result<DMatrix<f64>> {
                let mut part = DMatrix::zeros(k, k);
                let mut cur = vec![first];
                let mut failure = None;
                for_each_extension(&mut cur, k, size, &mut |omega| {
                    if failure.is_some() {
                        return;
                    }
                    match completion_coefficients(e, omega) {
                        Ok(x) => accumulate(&mut part, omega, &x, 1.0),
                        Err(err) => failure = Some(err),
                    }
                });
                match failure {
                    Some(err) => Err(err),
                    None => Ok(part),
                }
            })
            .collect::<Vec<_>>();
        for part in parts {
            s += part? * w;
        }
    }
    let pm = e.projector().as_matrix();
    Ok(SymmetricMatrix::symmetrize(pm * s * pm))
}

/// Combinatorial width `ω(E, ℓ, p)`.
pub fn comb_width(e: &Eigenspace, ell: usize, p: f64, mode: WidthMode) -> Result<WidthEstimate> {
    match mode {
        WidthMode::Exact => {
            let sigma = correlation_matrix_exact(e, ell, p)?;
            let k = e.ambient();
            Ok(WidthEstimate {
                value: sigma.spectral_norm()?,
                std_error: 0.0,
                samples: (0..=ell).map(|i| binomial(k, i) as usize).sum(),
                ell,
                p,
                exact: true,
            })
        }
        WidthMode::MonteCarlo { samples, seed } => comb_width_mc(e, ell, p, samples, seed),
    }
}

fn comb_width_mc(e: &Eigenspace, ell: usize, p: f64, samples: usize, seed: u64) -> Result<WidthEstimate> {
    check_width_params(e, ell, p)?;
    if samples < MC_BLOCKS as usize {
        return Err(Error::invalid(format!("need at least {MC_BLOCKS} samples")));
    }
    let k = e.ambient();
    let blocks: Vec<u64> = (0..MC_BLOCKS).collect();
    let per_block: Vec<usize> = blocks
        .iter()
        .map(|&b| samples / MC_BLOCKS as usize + usize::from((b as usize) < samples % MC_BLOCKS as usize))
        .collect();

    let sums = blocks
        .par_iter()
        .map(|&b| -> Result<DMatrix<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut s = DMatrix::zeros(k, k);
            let mut omega = Vec::with_capacity(k);
            for _ in 0..per_block[b as usize] {
                let mut tries = 0;
                loop {
                    omega.clear();
                    omega.extend((0..k).filter(|_| rng.random_bool(p)));
                    if omega.len() <= ell {
                        break;
                    }
                    tries += 1;
                    if tries >= MAX_RESAMPLES {
                        return Err(Error::invalid(format!(
                            "|Ω| ≤ {ell} rejected {MAX_RESAMPLES} times in a row at p = {p}"
                        )));
                    }
                }
                if !omega.is_empty() {
                    let x = completion_coefficients(e, &omega)?;
                    accumulate(&mut s, &omega, &x, 1.0);
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;

    let pm = e.projector().as_matrix();
    let total: DMatrix<f64> = sums.iter().fold(DMatrix::zeros(k, k), |acc, s| acc + s);
    let norm_of = |s: &DMatrix<f64>, count: usize| -> Result<f64> {
        SymmetricMatrix::symmetrize(pm * s * pm / count as f64).spectral_norm()
    };
    let value = norm_of(&total, samples)?;

    let g = MC_BLOCKS as f64;
    let leave_out = sums
        .iter()
        .zip(&per_block)
        .map(|(s, &c)| norm_of(&(&total - s), samples - c))
        .collect::<Result<Vec<_>>>()?;
    let mean = leave_out.iter().sum::<f64>() / g;
    let var = (g - 1.0) / g * leave_out.iter().map(|t| (t - mean).powi(2)).sum::<f64>();

    Ok(WidthEstimate {
        value,
        std_error: var.sqrt(),
        samples,
        ell,
        p,
        exact: false,
    })
}

/// `ℓ = ⌈(kp + 1/μ)/2⌉`, clamped to `1..=k`.
pub fn default_ell(k: usize, p: f64, mu: f64) -> usize {
    let inv = if mu > 0.0 { 1.0 / mu } else { k as f64 };
    let ell = (0.5 * (k as f64 * p + inv) - 1e-12).ceil();
    (ell.max(1.0) as usize).min(k)
}

/// Key-value summary of an eigenspace.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub mu: f64,
    pub krank: usize,
    pub krank_exact: bool,
    pub ell: usize,
    pub zeta: f64,
    pub omega: f64,
    pub std_error: f64,
    pub eigengap: f64,
    #[serde(rename = "lambda_E")]
    pub lambda_e: f64,
    pub dim: usize,
}

/// Computes every invariant of the eigenspace of `g` for `eigenvalue`.
/// `ell` defaults to `⌈(kp + 1/μ)/2⌉`; `mc_samples` switches the width to
/// Monte Carlo.
pub fn invariant_report(
    g: &Graph,
    eigenvalue: f64,
    ell: Option<usize>,
    p: f64,
    mc_samples: Option<usize>,
    krank_cap: Option<usize>,
) -> Result<InvariantReport> {
    let d = eig_sym(&g.adjacency(), DEFAULT_GROUP_TOL)?;
    let idx = d.nearest(eigenvalue).ok_or_else(|| Error::invalid("empty graph"))?;
    let e = Eigenspace::from_decomposition(&d, idx)?;
    let mu = coherence(&e)?;
    let k = g.n();
    let kr = kruskal_rank(&e, krank_cap.unwrap_or(k).min(k))?;
    let ell = ell.unwrap_or_else(|| default_ell(k, p, mu));
    let mode = match mc_samples {
        Some(samples) => WidthMode::MonteCarlo { samples, seed: 0 },
        None => WidthMode::Exact,
    };
    let width = comb_width(&e, ell, p, mode)?;
    Ok(InvariantReport {
        mu,
        krank: kr.lower,
        krank_exact: kr.exact,
        ell,
        zeta: zeta(&e, ell)?,
        omega: width.value,
        std_error: width.std_error,
        eigengap: eigengap(&d, idx)?,
        lambda_e: e.lambda(),
        dim: e.dim(),
    })
}
