//! Dual certificates of exact recovery and the probability bounds that
//! control when they exist.
//!
//! All matrices live in the canonical frame: the hidden vertices first, in
//! planted-label order, then the remaining observed vertices in increasing
//! order.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::harness::PlantedInstance;
use crate::invariants::{
    coherence, comb_width, default_ell, kruskal_rank, q_omega, zeta, Eigenspace, WidthEstimate, WidthMode,
};
use crate::spectral::{eigh, is_strictly_spectrally_comonotone, comonotone_margin, SymmetricMatrix};

/// Relative tolerance for the equality-type certificate conditions.
pub const CERT_TOL: f64 = 1e-8;

/// Relative default for the strict-comonotonicity margin.
pub const DEFAULT_MARGIN_REL: f64 = 1e-6;

/// Values of `c2` at which `p2` is also reported.
pub const C2_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// `M = [[M11, M12], [M12', M22]]` in the canonical frame.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub m11: SymmetricMatrix,
    pub m12: DMatrix<f64>,
    pub m22: SymmetricMatrix,
    pub eigenspace: Eigenspace,
    /// `order[c]` is the observed vertex at canonical position `c`.
    pub order: Vec<usize>,
}

impl DualCertificate {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn k(&self) -> usize {
        self.m11.dim()
    }

    /// The full `n × n` matrix in the canonical frame.
    pub fn assemble(&self) -> SymmetricMatrix {
        let (n, k) = (self.n(), self.k());
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (k, k)).copy_from(self.m11.as_matrix());
        m.view_mut((0, k), (k, n - k)).copy_from(&self.m12);
        m.view_mut((k, 0), (n - k, k)).copy_from(&self.m12.transpose());
        m.view_mut((k, k), (n - k, n - k)).copy_from(self.m22.as_matrix());
        SymmetricMatrix::symmetrize(m)
    }
}

/// Hidden vertices in label order followed by the rest ascending.
pub fn canonical_order(instance: &PlantedInstance) -> Vec<usize> {
    let mut order = instance.embedding();
    let mut hidden = vec![false; instance.n()];
    for &v in &order {
        hidden[v] = true;
    }
    order.extend((0..instance.n()).filter(|&v| !hidden[v]));
    order
}

fn canonical_adjacency(g: &Graph, order: &[usize]) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(order.len(), |a, b| if g.has_edge(order[a], order[b]) { 1.0 } else { 0.0 })
}

/// `M11 = A_Γ`; column `j` of `M12` is the minimum-norm vector of `E` equal
/// to one on the planted neighbours of the `j`-th outside vertex; `M22` is
/// `1` on noise edges, `−p/(1−p)` on noise non-edges and zero on the
/// diagonal.
pub fn build_certificate(instance: &PlantedInstance, e: &Eigenspace) -> Result<DualCertificate> {
    let (n, k) = (instance.n(), instance.k());
    if e.ambient() != k {
        return Err(Error::invalid(format!(
            "eigenspace lives in R^{}, planted graph has {k} vertices",
            e.ambient()
        )));
    }
    let p = instance.p;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} outside [0, 1)")));
    }
    let order = canonical_order(instance);
    let a = canonical_adjacency(&instance.observed, &order);

    let mut m12 = DMatrix::zeros(k, n - k);
    for j in 0..(n - k) {
        let omega: Vec<usize> = (0..k).filter(|&i| a.get(i, k + j) == 1.0).collect();
        m12.set_column(j, &q_omega(e, &omega)?);
    }
    let off = -p / (1.0 - p);
    let m22 = SymmetricMatrix::from_fn(n - k, |i, j| {
        if i == j {
            0.0
        } else if a.get(k + i, k + j) == 1.0 {
            1.0
        } else {
            off
        }
    });
    Ok(DualCertificate {
        m11: instance.planted.adjacency(),
        m12,
        m22,
        eigenspace: e.clone(),
        order,
    })
}

/// Largest singular value of a rectangular matrix.
pub fn operator_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    let top = eigh(&SymmetricMatrix::symmetrize(gram))?.values[0];
    Ok(top.max(0.0).sqrt())
}

/// `min |α − β|` over eigenvalues `α` of `M|_E` and `β` of `M|_{E⊥}`;
/// `+∞` if `E⊥ = 0`. `E` must be invariant under `M`.
pub fn subspace_eigengap(m: &SymmetricMatrix, p: &SymmetricMatrix, tol: f64) -> Result<f64> {
    let scale = m.spectral_norm()?.max(1.0);
    let comm = m.commutator_norm(p);
    if comm > tol * scale {
        return Err(Error::invalid(format!("subspace is not invariant: ‖MP − PM‖_F = {comm:e}")));
    }
    let e = eigh(p)?;
    let rank = e.values.iter().filter(|&&v| v > 0.5).count();
    let k = p.dim();
    if rank == 0 {
        return Err(Error::invalid("projector has empty range"));
    }
    if rank == k {
        return Ok(f64::INFINITY);
    }
    let inside = eigh(&m.compress(&e.vectors.columns(0, rank).into_owned()))?.values;
    let outside = eigh(&m.compress(&e.vectors.columns(rank, k - rank).into_owned()))?.values;
    Ok(inside
        .iter()
        .flat_map(|a| outside.iter().map(move |b| (a - b).abs()))
        .fold(f64::INFINITY, f64::min))
}

/// Outcome of each certificate condition plus the end-to-end check.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub entries_match: bool,
    pub m11_strictly_comonotone: bool,
    pub m11_restricted_brackets: bool,
    pub m12_columns_in_e: bool,
    pub eigengap_dominates: bool,
    /// `M` strictly comonotone with `[A_Γ − λ_E I]` padded to size `n`.
    pub end_to_end: bool,
    pub overall: bool,
    pub margin: f64,
    pub tol: f64,
    pub entry_error: f64,
    pub m11_comonotone_slack: Option<f64>,
    pub m11_restricted_min: f64,
    pub m11_restricted_max: f64,
    pub m12_off_e: f64,
    pub m12_norm: f64,
    pub m22_norm: f64,
    pub eigengap: f64,
    /// `eigengap − ‖M12‖₂ − ‖M22‖₂ − |λ_E|`.
    pub eigengap_slack: f64,
    pub end_to_end_slack: Option<f64>,
    #[serde(rename = "lambda_E")]
    pub lambda_e: f64,
}

impl CertificateReport {
    pub fn conditions(&self) -> [bool; 5] {
        [
            self.entries_match,
            self.m11_strictly_comonotone,
            self.m11_restricted_brackets,
            self.m12_columns_in_e,
            self.eigengap_dominates,
        ]
    }
}

/// Checks every condition. `margin` defaults to `1e-6·‖M‖₂`.
pub fn verify_certificate(
    cert: &DualCertificate,
    instance: &PlantedInstance,
    gamma: f64,
    margin: Option<f64>,
) -> Result<CertificateReport> {
    let e = &cert.eigenspace;
    let lambda = e.lambda();
    if (gamma - lambda).abs() > CERT_TOL * lambda.abs().max(1.0) {
        return Err(Error::invalid(format!("gamma = {gamma} differs from the eigenvalue {lambda}")));
    }
    let (n, k) = (cert.n(), cert.k());
    if instance.n() != n || instance.k() != k {
        return Err(Error::invalid("certificate and instance sizes differ"));
    }
    let m = cert.assemble();
    let m_norm = m.spectral_norm()?;
    let margin = margin.unwrap_or(DEFAULT_MARGIN_REL * m_norm);
    if margin < 0.0 {
        return Err(Error::invalid("margin must be nonnegative"));
    }
    let scale = m_norm.max(1.0);
    let tol = CERT_TOL * scale;

    let order = canonical_order(instance);
    let a = canonical_adjacency(&instance.observed, &order);
    let mut entry_error = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            if i == j || a.get(i, j) == 1.0 {
                entry_error = entry_error.max((m.get(i, j) - a.get(i, j)).abs());
            }
        }
    }

    let a_gamma = instance.planted.adjacency();
    let m11_strict = is_strictly_spectrally_comonotone(&cert.m11, &a_gamma, margin, CERT_TOL)?;
    let m11_slack = comonotone_margin(&cert.m11, &a_gamma, CERT_TOL)?;

    let basis = e_basis(e)?;
    let restricted = eigh(&cert.m11.compress(&basis))?.values;
    let (rmin, rmax) = (*restricted.last().unwrap(), restricted[0]);
    let brackets = rmax >= lambda - tol && rmin <= lambda + tol;

    let pe = e.projector().as_matrix();
    let off_e = (&cert.m12 - pe * &cert.m12).norm();

    let m12_norm = operator_norm(&cert.m12)?;
    let m22_norm = cert.m22.spectral_norm()?;
    let gap = subspace_eigengap(&cert.m11, e.projector(), CERT_TOL)?;
    let slack = gap - m12_norm - m22_norm - lambda.abs();

    let shifted = &a_gamma - &SymmetricMatrix::identity(k).scale(lambda);
    let w = SymmetricMatrix::from_fn(n, |i, j| if i < k && j < k { shifted.get(i, j) } else { 0.0 });
    let end_to_end = is_strictly_spectrally_comonotone(&m, &w, margin, CERT_TOL)?;
    let end_to_end_slack = comonotone_margin(&m, &w, CERT_TOL)?;

    let mut report = CertificateReport {
        entries_match: entry_error <= tol,
        m11_strictly_comonotone: m11_strict,
        m11_restricted_brackets: brackets,
        m12_columns_in_e: off_e <= tol,
        eigengap_dominates: slack > margin,
        end_to_end,
        overall: false,
        margin,
        tol,
        entry_error,
        m11_comonotone_slack: m11_slack,
        m11_restricted_min: rmin,
        m11_restricted_max: rmax,
        m12_off_e: off_e,
        m12_norm,
        m22_norm,
        eigengap: gap,
        eigengap_slack: slack,
        end_to_end_slack,
        lambda_e: lambda,
    };
    report.overall = report.conditions().iter().all(|&c| c) && report.end_to_end;
    Ok(report)
}

fn e_basis(e: &Eigenspace) -> Result<DMatrix<f64>> {
    let d = eigh(e.projector())?;
    let rank = d.values.iter().filter(|&&v| v > 0.5).count();
    if rank == 0 {
        return Err(Error::invalid("eigenspace is trivial"));
    }
    Ok(d.vectors.columns(0, rank).into_owned())
}

/// Quantities entering the recovery probability bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    pub k: usize,
    pub n: usize,
    pub p: f64,
    pub ell: usize,
    pub c2: f64,
    pub zeta: f64,
    pub omega: f64,
    /// Standard error of `omega` (zero when exact).
    pub omega_std_error: f64,
    pub eigengap: f64,
    pub lambda_e: f64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub ell: usize,
    pub c1: f64,
    pub c2: f64,
    pub zeta: f64,
    pub omega: f64,
    pub omega_std_error: f64,
    pub eigengap: f64,
    #[serde(rename = "lambda_E")]
    pub lambda_e: f64,
    #[serde(rename = "dim_E")]
    pub dim_e: usize,
    pub sigma_tilde: f64,
    pub sigma_star: f64,
    pub n_threshold: f64,
    /// Two-standard-error interval on `n_threshold` for sampled widths.
    pub n_threshold_interval: Option<(f64, f64)>,
    /// `n < n_threshold`.
    pub n_condition: bool,
    /// `eigengap > 2|λ_E|`; otherwise the noise-block term admits no `n`.
    pub gap_condition: bool,
    pub p1: f64,
    pub p2: f64,
    pub p1_raw: f64,
    pub p2_raw: f64,
    pub clamped: bool,
    /// `max(0, 1 − p1 − p2)`.
    pub success_lower_bound: f64,
    /// `(c2, p2)` over [`C2_GRID`].
    pub p2_by_c2: Vec<(f64, f64)>,
}

pub fn c1(p: f64) -> f64 {
    (9.0 * p / (1.0 - p)).sqrt()
}

fn p2_raw(i: &BoundInputs, c1: f64, c2: f64) -> f64 {
    let d = (i.n - i.k) as f64;
    let t = 0.5 * i.eigengap - i.lambda_e.abs() - c1 * d.sqrt();
    d * (-c2 * t * t).exp()
}

/// Evaluates the threshold on `n` and the failure probabilities `p1`, `p2`
/// from already computed invariants. Vanishing `ω` or `c1` make the
/// corresponding threshold term infinite.
pub fn bounds_from_invariants(i: &BoundInputs) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&i.p) {
        return Err(Error::invalid(format!("p = {} outside [0, 1)", i.p)));
    }
    if i.n < i.k {
        return Err(Error::invalid(format!("n = {} below k = {}", i.n, i.k)));
    }
    if !(i.c2 > 0.0) {
        return Err(Error::invalid("c2 must be positive"));
    }
    let kp = i.k as f64 * i.p;
    let ell = i.ell as f64;
    if !(kp < ell) {
        return Err(Error::invalid(format!("need kp = {kp} < ell = {}", i.ell)));
    }
    let c1 = c1(i.p);
    let eg = i.eigengap;
    let lam = i.lambda_e.abs();
    let d = (i.n - i.k) as f64;

    let width_term = |omega: f64| if omega > 0.0 { eg * eg / (4.0 * omega) } else { f64::INFINITY };
    let gap_condition = eg > 2.0 * lam;
    let noise_term = if !gap_condition {
        0.0
    } else if c1 > 0.0 {
        (eg - 2.0 * lam).powi(2) / (4.0 * c1 * c1)
    } else {
        f64::INFINITY
    };
    let t1 = width_term(i.omega);
    let n_threshold = t1.min(noise_term) + i.k as f64;
    let n_threshold_interval = (i.omega_std_error > 0.0 && i.omega > 0.0).then(|| {
        let sd = eg * eg / (4.0 * i.omega * i.omega) * i.omega_std_error;
        let k = i.k as f64;
        ((t1 - 2.0 * sd).max(0.0).min(noise_term) + k, (t1 + 2.0 * sd).min(noise_term) + k)
    });

    let tail = (-(ell - kp).powi(2) / (ell + kp)).exp();
    let first = (d * (-tail).ln_1p()).exp();
    let quarter = 0.25 * eg * eg;
    let expo = 3.0 * i.zeta * (quarter - d * i.omega).powi(2) / (4.0 * ell * (quarter + 2.0 * d * i.omega));
    let second = 1.0 - 2.0 * i.k as f64 * (-expo).exp();
    let p1_raw = 1.0 - first * second;
    let p2_raw_v = p2_raw(i, c1, i.c2);
    let p1 = p1_raw.clamp(0.0, 1.0);
    let p2 = p2_raw_v.clamp(0.0, 1.0);

    let sigma_tilde = if d >= 1.0 { ((d - 1.0) * i.p / (1.0 - i.p)).sqrt() } else { 0.0 };
    let sigma_star = if i.p > 0.0 { (i.p / (1.0 - i.p)).max(1.0) } else { 0.0 };

    Ok(BoundReport {
        n: i.n,
        k: i.k,
        p: i.p,
        ell: i.ell,
        c1,
        c2: i.c2,
        zeta: i.zeta,
        omega: i.omega,
        omega_std_error: i.omega_std_error,
        eigengap: eg,
        lambda_e: i.lambda_e,
        dim_e: i.dim,
        sigma_tilde,
        sigma_star,
        n_threshold,
        n_threshold_interval,
        n_condition: gap_condition && (i.n as f64) < n_threshold,
        gap_condition,
        p1,
        p2,
        p1_raw,
        p2_raw: p2_raw_v,
        clamped: p1 != p1_raw || p2 != p2_raw_v,
        success_lower_bound: (1.0 - p1 - p2).max(0.0),
        p2_by_c2: C2_GRID.iter().map(|&c| (c, p2_raw(i, c1, c).clamp(0.0, 1.0))).collect(),
    })
}

/// Recovery bound for planting `graph` in `n` vertices at noise `p`, using
/// the eigenspace `e`, the enumerated or sampled width and the exact `ζ`.
pub fn theorem_bounds(
    graph: &Graph,
    e: &Eigenspace,
    n: usize,
    p: f64,
    ell: usize,
    c2: f64,
    width: WidthMode,
) -> Result<BoundReport> {
    let k = graph.n();
    if e.ambient() != k {
        return Err(Error::invalid("eigenspace and graph sizes differ"));
    }
    if !(k as f64 * p < ell as f64) {
        return Err(Error::invalid(format!("need kp = {} < ell = {ell}", k as f64 * p)));
    }
    let kr = kruskal_rank(e, ell)?;
    if kr.lower < ell {
        return Err(Error::invalid(format!("ell = {ell} exceeds the Kruskal rank {}", kr.lower)));
    }
    let w: WidthEstimate = comb_width(e, ell, p, width)?;
    let gap = subspace_eigengap(&graph.adjacency(), e.projector(), CERT_TOL)?;
    bounds_from_invariants(&BoundInputs {
        k,
        n,
        p,
        ell,
        c2,
        zeta: zeta(e, ell)?,
        omega: w.value,
        omega_std_error: w.std_error,
        eigengap: gap,
        lambda_e: e.lambda(),
        dim: e.dim(),
    })
}

/// Closed-form widths for graphs whose automorphism group and that of the
/// complement act transitively: `ω ≤ 4k²p / (dim²(1 − kpμ))`,
/// `ζ ≥ dim(1 − kpμ)/(2k)`, `ℓ = ⌈(kp + 1/μ)/2⌉`.
pub fn corollary_inputs(k: usize, n: usize, p: f64, mu: f64, dim: usize, eigengap: f64, lambda_e: f64, c2: f64) -> Result<BoundInputs> {
    let kp = k as f64 * p;
    if !(kp * mu < 1.0) {
        return Err(Error::invalid(format!("need p < 1/(μk); kpμ = {}", kp * mu)));
    }
    let slack = 1.0 - kp * mu;
    let dimf = dim as f64;
    Ok(BoundInputs {
        k,
        n,
        p,
        ell: default_ell(k, p, mu),
        c2,
        zeta: dimf / (2.0 * k as f64) * slack,
        omega: 4.0 * (k * k) as f64 * p / (dimf * dimf * slack),
        omega_std_error: 0.0,
        eigengap,
        lambda_e,
        dim,
    })
}

/// [`corollary_inputs`] with `μ`, `dim` and the eigengap computed from `e`.
pub fn corollary_bounds(graph: &Graph, e: &Eigenspace, n: usize, p: f64, c2: f64) -> Result<BoundReport> {
    let mu = coherence(e)?;
    let gap = subspace_eigengap(&graph.adjacency(), e.projector(), CERT_TOL)?;
    bounds_from_invariants(&corollary_inputs(graph.n(), n, p, mu, e.dim(), gap, e.lambda(), c2)?)
}

/// Corollary inputs for the `k`-clique with eigenvalue `−1`:
/// `μ = 1/(k−1)`, `dim = k−1`, eigengap `k`.
pub fn clique_inputs(k: usize, n: usize, p: f64, c2: f64) -> Result<BoundInputs> {
    if k < 2 {
        return Err(Error::invalid("clique needs k ≥ 2"));
    }
    corollary_inputs(k, n, p, 1.0 / (k - 1) as f64, k - 1, k as f64, -1.0, c2)
}
