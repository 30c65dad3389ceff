//! Dense symmetric eigen-analysis.
//!
//! Eigenpairs come from a cyclic Jacobi sweep. On top of that sit the
//! grouped [`SpectralDecomposition`] (distinct eigenvalues, multiplicities,
//! orthogonal projectors), eigengaps, restrictions to invariant subspaces
//! and the spectral comonotonicity tests.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default relative tolerance for merging nearly equal eigenvalues.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

/// Jacobi stops once the off-diagonal Frobenius mass drops below this
/// fraction of the Frobenius norm of the input.
const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 60;

/// A real symmetric matrix. Symmetry is enforced on construction by
/// mirroring the upper triangle, so `get(i, j) == get(j, i)` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds a symmetric matrix from a square one; the upper triangle is
    /// authoritative.
    pub fn from_upper(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut inner = m;
        let n = inner.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                inner[(i, j)] = inner[(j, i)];
            }
        }
        Ok(Self { inner })
    }

    /// Wraps a matrix already known to be symmetric (up to rounding) by
    /// averaging it with its transpose.
    pub(crate) fn symmetrize(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut inner = m;
        for j in 0..n {
            for i in (j + 1)..n {
                let v = 0.5 * (inner[(i, j)] + inner[(j, i)]);
                inner[(i, j)] = v;
                inner[(j, i)] = v;
            }
        }
        Self { inner }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut inner = DMatrix::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            inner[(i, i)] = v;
        }
        Self { inner }
    }

    /// `f(i, j)` is only evaluated for `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut inner = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = f(i, j);
                inner[(i, j)] = v;
                inner[(j, i)] = v;
            }
        }
        Self { inner }
    }

    /// `V diag(d) V'`.
    pub fn from_eigen(vectors: &DMatrix<f64>, values: &[f64]) -> Self {
        let mut scaled = vectors.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        Self::symmetrize(scaled * vectors.transpose())
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.inner[(i, j)] = v;
        self.inner[(j, i)] = v;
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Frobenius inner product `trace(self * other)`.
    pub fn dot(&self, other: &SymmetricMatrix) -> f64 {
        self.inner.dot(&other.inner)
    }

    pub fn scale(&self, s: f64) -> SymmetricMatrix {
        Self {
            inner: &self.inner * s,
        }
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let e = eigh(self)?;
        Ok(e.values
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs())))
    }

    /// `‖AB − BA‖_F`.
    pub fn commutator_norm(&self, other: &SymmetricMatrix) -> f64 {
        let ab = &self.inner * &other.inner;
        // BA = (AB)' for symmetric A, B
        (&ab - ab.transpose()).norm()
    }

    pub fn principal_submatrix(&self, indices: &[usize]) -> SymmetricMatrix {
        let m = indices.len();
        let mut inner = DMatrix::zeros(m, m);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                inner[(a, b)] = self.inner[(i, j)];
            }
        }
        Self { inner }
    }

    /// `Q' A Q` for a matrix with orthonormal columns.
    pub fn compress(&self, q: &DMatrix<f64>) -> SymmetricMatrix {
        Self::symmetrize(q.transpose() * &self.inner * q)
    }

    /// Conjugation by a permutation: result `(i, j)` = `self(perm[i], perm[j])`.
    pub fn permute(&self, perm: &[usize]) -> SymmetricMatrix {
        self.principal_submatrix(perm)
    }
}

impl Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn add(self, rhs: Self) -> SymmetricMatrix {
        SymmetricMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn sub(self, rhs: Self) -> SymmetricMatrix {
        SymmetricMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul<f64> for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn mul(self, rhs: f64) -> SymmetricMatrix {
        self.scale(rhs)
    }
}

/// Eigenvalues (descending) with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn eigh(a: &SymmetricMatrix) -> Result<Eigh> {
    let n = a.dim();
    let work = a.inner.clone();
    jacobi(work, DMatrix::identity(n, n))
}

/// Jacobi started from the basis `hint`: the rotations are applied to
/// `hint' A hint`, which is nearly diagonal when `hint` diagonalizes a
/// nearby matrix. Used by iterative solvers.
pub fn eigh_warm(a: &SymmetricMatrix, hint: &DMatrix<f64>) -> Result<Eigh> {
    let work = hint.transpose() * &a.inner * hint;
    jacobi(work, hint.clone())
}

fn jacobi(mut a: DMatrix<f64>, mut v: DMatrix<f64>) -> Result<Eigh> {
    let n = a.nrows();
    let total = a.norm();
    let mut sweeps = 0;
    if n > 1 && total > 0.0 {
        loop {
            let mut off = 0.0;
            for j in 0..n {
                for i in 0..j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            let off = (2.0 * off).sqrt();
            if off <= JACOBI_OFF_TOL * total {
                break;
            }
            if sweeps == JACOBI_MAX_SWEEPS {
                return Err(Error::Numeric { iterations: sweeps });
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, sweeps);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(v.nrows(), n, |r, c| v[(r, order[c])]);
    Ok(Eigh {
        values,
        vectors,
        sweeps,
    })
}

#[inline]
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, sweep: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let g = 100.0 * apq.abs();
    if sweep > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        a[(p, q)] = 0.0;
        a[(q, p)] = 0.0;
        return;
    }
    let h = aqq - app;
    let t = if h.abs() + g == h.abs() {
        apq / h
    } else {
        let theta = 0.5 * h / apq;
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let np = c * akp - s * akq;
        let nq = s * akp + c * akq;
        a[(k, p)] = np;
        a[(p, k)] = np;
        a[(k, q)] = nq;
        a[(q, k)] = nq;
    }
    a[(p, p)] = app - t * apq;
    a[(q, q)] = aqq + t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..v.nrows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Eigenvalues grouped into distinct values, sorted descending, with their
/// multiplicities and orthogonal projectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub distinct_values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub projectors: Vec<SymmetricMatrix>,
    /// Orthonormal eigenvectors as columns, ordered like the eigenvalues.
    pub basis: DMatrix<f64>,
    /// Raw (ungrouped) eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.distinct_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_values.is_empty()
    }

    /// Column range of `basis` spanning the `i`-th eigenspace.
    pub fn group_range(&self, i: usize) -> std::ops::Range<usize> {
        let start: usize = self.multiplicities[..i].iter().sum();
        start..start + self.multiplicities[i]
    }

    /// Orthonormal basis of the `i`-th eigenspace.
    pub fn eigenspace_basis(&self, i: usize) -> DMatrix<f64> {
        let r = self.group_range(i);
        self.basis.columns(r.start, r.len()).into_owned()
    }

    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let n = self.basis.nrows();
        let mut out = SymmetricMatrix::zeros(n);
        for (lam, p) in self.distinct_values.iter().zip(&self.projectors) {
            out = &out + &p.scale(*lam);
        }
        out
    }

    /// Index of the distinct eigenvalue closest to `value`.
    pub fn nearest(&self, value: f64) -> Option<usize> {
        self.distinct_values
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - value).abs().total_cmp(&(b.1 - value).abs()))
            .map(|(i, _)| i)
    }
}

/// Eigendecomposition with eigenvalues closer than
/// `group_tol * max(1, ‖A‖₂)` merged into one distinct value.
pub fn eig_sym(a: &SymmetricMatrix, group_tol: f64) -> Result<SpectralDecomposition> {
    if !(group_tol > 0.0) {
        return Err(Error::invalid("group_tol must be positive"));
    }
    let e = eigh(a)?;
    Ok(group_eigh(e, group_tol))
}

pub(crate) fn group_eigh(e: Eigh, group_tol: f64) -> SpectralDecomposition {
    let n = e.values.len();
    let norm = e.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = group_tol * norm.max(1.0);

    let mut distinct_values = Vec::new();
    let mut multiplicities = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && e.values[end - 1] - e.values[end] <= tol {
            end += 1;
        }
        let mean = e.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        distinct_values.push(mean);
        multiplicities.push(end - start);
        start = end;
    }

    let mut projectors = Vec::with_capacity(multiplicities.len());
    let mut offset = 0;
    for &m in &multiplicities {
        let q = e.vectors.columns(offset, m);
        projectors.push(SymmetricMatrix::symmetrize(q * q.transpose()));
        offset += m;
    }

    SpectralDecomposition {
        distinct_values,
        multiplicities,
        projectors,
        basis: e.vectors,
        eigenvalues: e.values,
    }
}

/// Distance from the `e_index`-th distinct eigenvalue to the nearest other
/// one; `+∞` when there is only one.
pub fn eigengap(d: &SpectralDecomposition, e_index: usize) -> Result<f64> {
    let lam = *d
        .distinct_values
        .get(e_index)
        .ok_or_else(|| Error::invalid(format!("eigenspace index {e_index} out of range")))?;
    Ok(d.distinct_values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e_index)
        .map(|(_, v)| (v - lam).abs())
        .fold(f64::INFINITY, f64::min))
}

/// Extreme eigenvalues of `A` restricted to `range(P)`. `P` must be an
/// orthogonal projector whose range is invariant under `A`
/// (`‖AP − PA‖_F ≤ tol`).
pub fn restrict(a: &SymmetricMatrix, p: &SymmetricMatrix, tol: f64) -> Result<(f64, f64)> {
    if a.dim() != p.dim() {
        return Err(Error::invalid("dimension mismatch"));
    }
    let comm = a.commutator_norm(p);
    if comm > tol {
        return Err(Error::invalid(format!(
            "subspace is not invariant: ‖AP − PA‖_F = {comm:e}"
        )));
    }
    let e = eigh(p)?;
    let rank = e.values.iter().filter(|&&v| v > 0.5).count();
    if rank == 0 {
        return Err(Error::invalid("projector has empty range"));
    }
    let q = e.vectors.columns(0, rank).into_owned();
    restrict_to_basis(a, &q)
}

pub(crate) fn restrict_to_basis(a: &SymmetricMatrix, q: &DMatrix<f64>) -> Result<(f64, f64)> {
    let e = eigh(&a.compress(q))?;
    Ok((*e.values.last().unwrap(), e.values[0]))
}

/// Extremes of `A` on each eigenspace of `B` (decreasing eigenvalue order),
/// or `None` when `A` and `B` do not commute within `tol * scale`.
fn comonotone_blocks(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    tol: f64,
) -> Result<Option<(Vec<(f64, f64)>, f64)>> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let db = eig_sym(b, DEFAULT_GROUP_TOL)?;
    let norm_b = db.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let norm_a = a.spectral_norm()?;
    let scale = 1.0_f64.max(norm_a).max(norm_b);
    if a.commutator_norm(b) > tol * scale {
        return Ok(None);
    }
    let blocks = (0..db.len())
        .map(|i| restrict_to_basis(a, &db.eigenspace_basis(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some((blocks, scale)))
}

/// True iff `A` and `B` commute and, on the eigenspaces `E_1, E_2, …` of
/// `B` ordered by decreasing eigenvalue, `λ_min(A|E_i) ≥ λ_max(A|E_{i+1})`.
pub fn is_spectrally_comonotone(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Result<bool> {
    Ok(match comonotone_blocks(a, b, tol)? {
        None => false,
        Some((blocks, scale)) => blocks
            .windows(2)
            .all(|w| w[0].0 >= w[1].1 - tol * scale),
    })
}

/// Strict version: the block inequalities must hold with slack `margin`.
/// Not symmetric in its arguments.
pub fn is_strictly_spectrally_comonotone(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    margin: f64,
    tol: f64,
) -> Result<bool> {
    if margin < 0.0 {
        return Err(Error::invalid("margin must be nonnegative"));
    }
    Ok(match comonotone_blocks(a, b, tol)? {
        None => false,
        Some((blocks, _)) => blocks.windows(2).all(|w| w[0].0 > w[1].1 + margin),
    })
}

/// Smallest slack `min_i λ_min(A|E_i) − λ_max(A|E_{i+1})` over consecutive
/// eigenspaces of `B`; `None` if the pair does not commute. `+∞` when `B`
/// has a single eigenspace.
pub fn comonotone_margin(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Result<Option<f64>> {
    Ok(comonotone_blocks(a, b, tol)?.map(|(blocks, _)| {
        blocks
            .windows(2)
            .map(|w| w[0].0 - w[1].1)
            .fold(f64::INFINITY, f64::min)
    }))
}
