//! ADMM for the orbitope relaxation
//!
//! ```text
//! maximize ⟨A_G, A⟩  subject to  A_ij = 0 at non-edges (i ≠ j),  A ∈ O
//! ```
//!
//! with the splitting `A = Z`, `A` carrying the pattern constraint and the
//! objective, `Z` the orbitope constraint.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{binomial, Graph};
use crate::harness::PlantedInstance;
use crate::orbitope::{make_orbitope, OrbitopeProjector, OrbitopeSpec};
use crate::spectral::SymmetricMatrix;

/// Budget on `C(n, k)` for [`brute_force_plant_search`].
pub const BRUTE_FORCE_BUDGET: u128 = 5_000_000;

/// Largest planted size accepted by [`brute_force_plant_search`] by default.
pub const BRUTE_FORCE_MAX_K: usize = 8;

/// Residual samples are stored every this many iterations.
pub const TRACE_STRIDE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveParams {
    pub rho: f64,
    pub max_iter: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
    /// Spectrum shift: the orbitope is generated by `A_Γ − γI`.
    pub gamma: f64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_iter: 20_000,
            eps_abs: 1e-7,
            eps_rel: 1e-6,
            gamma: 0.0,
        }
    }
}

impl SolveParams {
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::invalid(format!("rho = {} must be positive", self.rho)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(self.eps_abs > 0.0 && self.eps_rel > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !self.gamma.is_finite() {
            return Err(Error::invalid("gamma must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Last orbitope iterate `Z`.
    pub a_hat: SymmetricMatrix,
    pub objective: f64,
    pub iterations: usize,
    pub primal_res: f64,
    pub dual_res: f64,
    pub status: SolveStatus,
    pub wall_time: Duration,
    pub gamma: f64,
    /// `max(primal_res, dual_res)` at iterations `TRACE_STRIDE, 2·TRACE_STRIDE, …`.
    pub residual_trace: Vec<f64>,
}

#[derive(Serialize)]
struct ReportJson {
    status: SolveStatus,
    objective: f64,
    iterations: usize,
    primal_res: f64,
    dual_res: f64,
    gamma: f64,
    wall_ms: u128,
    a_hat: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovered: Option<bool>,
}

impl SolveReport {
    /// JSON rendering; `recovered` is included when known.
    pub fn to_json(&self, recovered: Option<bool>) -> String {
        let m = self.a_hat.as_matrix();
        let rows = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        let doc = ReportJson {
            status: self.status,
            objective: self.objective,
            iterations: self.iterations,
            primal_res: self.primal_res,
            dual_res: self.dual_res,
            gamma: self.gamma,
            wall_ms: self.wall_time.as_millis(),
            a_hat: rows,
            recovered,
        };
        serde_json::to_string_pretty(&doc).expect("report fields serialize")
    }
}

/// Zeroes `X` at the non-edges of `g`; edges and the diagonal are kept.
pub fn project_pattern(g: &Graph, x: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    if g.n() != x.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: graph on {} vertices, matrix of size {}",
            g.n(),
            x.dim()
        )));
    }
    Ok(SymmetricMatrix::from_fn(x.dim(), |i, j| {
        if i == j || g.has_edge(i, j) {
            x.get(i, j)
        } else {
            0.0
        }
    }))
}

/// Solves the relaxation for `instance` with the orbitope of
/// `A_Γ − γI` padded to size `n`.
pub fn solve(instance: &PlantedInstance, params: &SolveParams) -> Result<SolveReport> {
    params.validate()?;
    let orbitope = make_orbitope(&instance.planted, params.gamma, instance.n())?;
    solve_with_orbitope(&instance.observed, orbitope, params)
}

/// ADMM against an explicit orbitope; `params.gamma` is only recorded.
pub fn solve_with_orbitope(observed: &Graph, orbitope: OrbitopeSpec, params: &SolveParams) -> Result<SolveReport> {
    params.validate()?;
    let n = observed.n();
    if orbitope.n() != n {
        return Err(Error::invalid(format!(
            "orbitope lives in S^{}, observed graph has {n} vertices",
            orbitope.n()
        )));
    }
    let start = Instant::now();
    let adj = observed.adjacency();
    let rho = params.rho;
    let scale = orbitope.spectrum().iter().map(|v| v * v).sum::<f64>().sqrt();
    let radius = adj.frobenius_norm();
    let mut proj = OrbitopeProjector::new(orbitope);

    let seed = if radius > 0.0 {
        adj.scale(scale / radius)
    } else {
        SymmetricMatrix::zeros(n)
    };
    let mut z = proj.project(&project_pattern(observed, &seed)?)?;
    let mut u = SymmetricMatrix::zeros(n);
    let linear = adj.scale(1.0 / rho);

    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let (mut r, mut s) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    for it in 1..=params.max_iter {
        iterations = it;
        let a = project_pattern(observed, &(&(&z - &u) + &linear))?;
        let z_new = proj.project(&(&a + &u))?;
        let diff = &a - &z_new;
        u = &u + &diff;
        r = diff.frobenius_norm();
        s = rho * (&z_new - &z).frobenius_norm();
        z = z_new;

        let eps_pri = n as f64 * params.eps_abs + params.eps_rel * a.frobenius_norm().max(z.frobenius_norm());
        let eps_dual = n as f64 * params.eps_abs + params.eps_rel * rho * u.frobenius_norm();
        if it % TRACE_STRIDE == 0 {
            trace.push(r.max(s));
        }
        if r <= eps_pri && s <= eps_dual {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(SolveReport {
        objective: adj.dot(&z),
        a_hat: z,
        iterations,
        primal_res: r,
        dual_res: s,
        status,
        wall_time: start.elapsed(),
        gamma: params.gamma,
        residual_trace: trace,
    })
}

/// True iff `‖Â − A*‖_F ≤ tol_rec · max(1, ‖A*‖_F)` for the planted matrix `A*`.
pub fn check_recovery(report: &SolveReport, instance: &PlantedInstance, tol_rec: f64) -> bool {
    let truth = instance.planted_matrix(report.gamma);
    if truth.dim() != report.a_hat.dim() {
        return false;
    }
    (&report.a_hat - &truth).frobenius_norm() <= tol_rec * truth.frobenius_norm().max(1.0)
}

/// All `k`-subsets of observed vertices whose induced subgraph is
/// isomorphic to the planted graph, in lexicographic order.
pub fn brute_force_plant_search(instance: &PlantedInstance, max_k: usize) -> Result<Vec<Vec<usize>>> {
    find_copies(&instance.observed, &instance.planted, max_k, BRUTE_FORCE_BUDGET)
}

pub fn find_copies(host: &Graph, pattern: &Graph, max_k: usize, budget: u128) -> Result<Vec<Vec<usize>>> {
    let (n, k) = (host.n(), pattern.n());
    if k > max_k {
        return Err(Error::invalid(format!("planted size {k} exceeds max_k = {max_k}")));
    }
    if k > n {
        return Ok(Vec::new());
    }
    let required = binomial(n, k);
    if required > budget {
        return Err(Error::Budget { required, limit: budget });
    }
    let edges = pattern.edge_count();
    let mut pattern_degrees: Vec<usize> = (0..k).map(|v| pattern.degree(v)).collect();
    pattern_degrees.sort_unstable();

    let mut found = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let induced = host.induced(&subset);
        if induced.edge_count() == edges {
            let mut degrees: Vec<usize> = (0..k).map(|v| induced.degree(v)).collect();
            degrees.sort_unstable();
            if degrees == pattern_degrees && isomorphic(pattern, &induced) {
                found.push(subset.clone());
            }
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
            break;
        };
        subset[pos] += 1;
        for i in (pos + 1)..k {
            subset[i] = subset[i - 1] + 1;
        }
    }
    Ok(found)
}

/// Backtracking isomorphism test for graphs of equal order.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    let k = a.n();
    if k != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut image = vec![usize::MAX; k];
    let mut used = vec![false; k];
    extend_map(a, b, 0, &mut image, &mut used)
}

fn extend_map(a: &Graph, b: &Graph, v: usize, image: &mut [usize], used: &mut [bool]) -> bool {
    if v == a.n() {
        return true;
    }
    for w in 0..b.n() {
        if used[w] || a.degree(v) != b.degree(w) {
            continue;
        }
        if (0..v).any(|u| a.has_edge(u, v) != b.has_edge(image[u], w)) {
            continue;
        }
        image[v] = w;
        used[w] = true;
        if extend_map(a, b, v + 1, image, used) {
            return true;
        }
        used[w] = false;
    }
    false
}
