//! The Schur-Horn orbitope `SH(M)`: the convex hull of all orthogonal
//! conjugates of `M`. It depends only on the spectrum of `M`, and a
//! symmetric `N` belongs to it iff the spectrum of `N` is majorized by that
//! of `M`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::spectral::{eig_sym, eigh, eigh_warm, SymmetricMatrix, DEFAULT_GROUP_TOL};

/// Target spectrum of an orbitope, sorted descending with repeats.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitopeSpec {
    spectrum: Vec<f64>,
    distinct: Vec<(f64, usize)>,
}

impl OrbitopeSpec {
    /// Orbitope of any matrix with the given eigenvalues. Values closer than
    /// `group_tol * max(1, max|λ|)` are merged to their mean.
    pub fn from_spectrum(mut spectrum: Vec<f64>, group_tol: f64) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        if spectrum.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("spectrum must be finite"));
        }
        spectrum.sort_by(|a, b| b.total_cmp(a));
        let scale = spectrum.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let tol = group_tol * scale;
        let mut distinct: Vec<(f64, usize)> = Vec::new();
        let mut start = 0;
        while start < spectrum.len() {
            let mut end = start + 1;
            while end < spectrum.len() && spectrum[end - 1] - spectrum[end] <= tol {
                end += 1;
            }
            let mean = spectrum[start..end].iter().sum::<f64>() / (end - start) as f64;
            let mean = if mean.abs() <= tol { 0.0 } else { mean };
            spectrum[start..end].iter_mut().for_each(|v| *v = mean);
            distinct.push((mean, end - start));
            start = end;
        }
        Ok(Self { spectrum, distinct })
    }

    pub fn n(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Distinct eigenvalues (descending) with multiplicities.
    pub fn distinct(&self) -> &[(f64, usize)] {
        &self.distinct
    }

    pub fn trace(&self) -> f64 {
        self.spectrum.iter().sum()
    }

    /// Sum of the `l` largest target eigenvalues.
    pub fn s_ell(&self, l: usize) -> f64 {
        self.spectrum[..l].iter().sum()
    }

    /// Frobenius norm shared by every extreme point.
    pub fn radius(&self) -> f64 {
        self.spectrum.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// The extreme point `diag(λ)`.
    pub fn diagonal_point(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_diagonal(&self.spectrum)
    }
}

/// `SH([A_Γ − γ I_k]_{k→n})`. Eigenvalues of the shifted planted matrix
/// within the grouping tolerance of zero merge with the `n − k` padding
/// zeros.
pub fn make_orbitope(planted: &Graph, gamma: f64, n: usize) -> Result<OrbitopeSpec> {
    make_orbitope_with_tol(planted, gamma, n, DEFAULT_GROUP_TOL)
}

pub fn make_orbitope_with_tol(
    planted: &Graph,
    gamma: f64,
    n: usize,
    group_tol: f64,
) -> Result<OrbitopeSpec> {
    let k = planted.n();
    if n < k {
        return Err(Error::invalid(format!("ambient size {n} smaller than planted size {k}")));
    }
    let shifted = &planted.adjacency() - &SymmetricMatrix::identity(k).scale(gamma);
    let d = eig_sym(&shifted, group_tol)?;
    let scale = d.eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut spectrum = Vec::with_capacity(n);
    for (&v, &m) in d.distinct_values.iter().zip(&d.multiplicities) {
        let v = if v.abs() <= group_tol * scale { 0.0 } else { v };
        spectrum.extend(std::iter::repeat_n(v, m));
    }
    spectrum.resize(n, 0.0);
    OrbitopeSpec::from_spectrum(spectrum, group_tol)
}

fn check_dim(o: &OrbitopeSpec, n: usize) -> Result<()> {
    if o.n() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: orbitope in S^{}, matrix in S^{n}",
            o.n()
        )));
    }
    Ok(())
}

/// Sum of the `l` largest eigenvalues of `N`.
pub fn s_ell(m: &SymmetricMatrix, l: usize) -> Result<f64> {
    if l == 0 || l > m.dim() {
        return Err(Error::invalid(format!("l = {l} outside 1..={}", m.dim())));
    }
    Ok(eigh(m)?.values[..l].iter().sum())
}

/// Membership by majorization: `s_l(N) ≤ s_l(M) + tol` for `l < n` and
/// equal traces within `tol`.
pub fn contains(o: &OrbitopeSpec, m: &SymmetricMatrix, tol: f64) -> Result<bool> {
    check_dim(o, m.dim())?;
    let values = eigh(m)?.values;
    Ok(majorized_by(&values, o.spectrum(), tol))
}

pub(crate) fn majorized_by(values: &[f64], target: &[f64], tol: f64) -> bool {
    let n = values.len();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for l in 0..n {
        lhs += values[l];
        rhs += target[l];
        if l + 1 < n && lhs > rhs + tol {
            return false;
        }
    }
    (lhs - rhs).abs() <= tol
}

fn is_descending(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

/// Euclidean projection of a descending vector `w` onto
/// `{y : Σ_{i≤j} y_i ≤ Σ_{i≤j} λ_i for j < n, Σ y = Σ λ}`.
///
/// The projection is `w − v` where `v` is the nonincreasing isotonic
/// regression of `w − λ`, computed by pooling adjacent violators.
pub fn project_spectrum(w: &[f64], lam: &[f64]) -> Result<Vec<f64>> {
    if w.len() != lam.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            w.len(),
            lam.len()
        )));
    }
    if !is_descending(w) || !is_descending(lam) {
        return Err(Error::invalid("inputs must be sorted in descending order"));
    }

    // (sum, count) blocks with nonincreasing means
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(w.len());
    for (wi, li) in w.iter().zip(lam) {
        blocks.push((wi - li, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 * c1 as f64 >= s1 * c0 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }

    let mut y = Vec::with_capacity(w.len());
    let mut i = 0;
    for (s, c) in blocks {
        let shift = s / c as f64;
        for _ in 0..c {
            y.push(w[i] - shift);
            i += 1;
        }
    }
    Ok(y)
}

/// Euclidean projection onto the orbitope: project the spectrum, keep the
/// eigenvectors.
pub fn project_orbitope(o: &OrbitopeSpec, x: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    check_dim(o, x.dim())?;
    let e = eigh(x)?;
    let y = project_spectrum(&e.values, o.spectrum())?;
    Ok(SymmetricMatrix::from_eigen(&e.vectors, &y))
}

/// Projection onto a fixed orbitope that reuses the previous eigenbasis as
/// a Jacobi warm start. Meant for sequences of nearby inputs.
#[derive(Clone, Debug)]
pub struct OrbitopeProjector {
    spec: OrbitopeSpec,
    basis: Option<DMatrix<f64>>,
}

impl OrbitopeProjector {
    pub fn new(spec: OrbitopeSpec) -> Self {
        Self { spec, basis: None }
    }

    pub fn spec(&self) -> &OrbitopeSpec {
        &self.spec
    }

    pub fn project(&mut self, x: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        check_dim(&self.spec, x.dim())?;
        let e = match &self.basis {
            Some(b) => eigh_warm(x, b)?,
            None => eigh(x)?,
        };
        let y = project_spectrum(&e.values, self.spec.spectrum())?;
        let out = SymmetricMatrix::from_eigen(&e.vectors, &y);
        self.basis = Some(e.vectors);
        Ok(out)
    }
}

/// Maximizes `⟨C, Z⟩` over the orbitope: the optimum aligns the target
/// spectrum with the eigenvectors of `C`, giving `Σ c_i λ_i` over both
/// sorted descending.
pub fn linmax_orbitope(o: &OrbitopeSpec, c: &SymmetricMatrix) -> Result<(f64, SymmetricMatrix)> {
    check_dim(o, c.dim())?;
    let e = eigh(c)?;
    let value = e.values.iter().zip(o.spectrum()).map(|(a, b)| a * b).sum();
    Ok((value, SymmetricMatrix::from_eigen(&e.vectors, o.spectrum())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{gen_clebsch, gen_clique};

    #[test]
    fn clique_orbitope_is_rank_one() {
        let o = make_orbitope(&gen_clique(5).unwrap(), -1.0, 9).unwrap();
        assert_eq!(o.distinct(), &[(5.0, 1), (0.0, 8)][..]);
    }

    #[test]
    fn clebsch_shifted_and_padded() {
        let o = make_orbitope(&gen_clebsch(), 1.0, 40).unwrap();
        let d = o.distinct();
        assert_eq!(d.len(), 3);
        assert!((d[0].0 - 4.0).abs() < 1e-12 && d[0].1 == 1);
        assert_eq!(d[1], (0.0, 34));
        assert!((d[2].0 + 4.0).abs() < 1e-12 && d[2].1 == 5);
    }

    #[test]
    fn unshifted_orbitope_is_the_spectrum() {
        let g = gen_clebsch();
        let o = make_orbitope(&g, 0.0, 16).unwrap();
        let d = o.distinct();
        assert_eq!(d.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 10, 5]);
        assert!(make_orbitope(&g, 0.0, 15).is_err());
    }

    #[test]
    fn s_ell_examples() {
        let d = SymmetricMatrix::from_diagonal(&[3.0, 1.0, -2.0]);
        assert!((s_ell(&d, 2).unwrap() - 4.0).abs() < 1e-12);
        assert!((s_ell(&d, 3).unwrap() - d.trace()).abs() < 1e-12);
        let k4 = gen_clique(4).unwrap().adjacency();
        assert!((s_ell(&k4, 1).unwrap() - 3.0).abs() < 1e-12);
        assert!(s_ell(&d, 0).is_err());
        assert!(s_ell(&d, 4).is_err());
    }

    #[test]
    fn two_by_two_projection() {
        assert_eq!(project_spectrum(&[3.0, 1.0], &[2.0, 2.0]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(project_spectrum(&[4.0, 1.0, -3.0], &[4.0, 1.0, -3.0]).unwrap(), vec![4.0, 1.0, -3.0]);
        assert!(project_spectrum(&[1.0, 3.0], &[2.0, 2.0]).is_err());
        assert!(project_spectrum(&[1.0], &[2.0, 2.0]).is_err());
    }

    #[test]
    fn scalar_matrix_projects_to_barycenter() {
        let o = OrbitopeSpec::from_spectrum(vec![5.0, 1.0, 0.0, -3.0], 1e-8).unwrap();
        let p = project_orbitope(&o, &SymmetricMatrix::identity(4).scale(7.0)).unwrap();
        let bary = SymmetricMatrix::identity(4).scale(o.trace() / 4.0);
        assert!((&p - &bary).frobenius_norm() < 1e-10);
        assert!(contains(&o, &bary, 1e-10).unwrap());
    }

    #[test]
    fn linmax_identity_gives_trace() {
        let o = OrbitopeSpec::from_spectrum(vec![2.0, 1.0, -0.5], 1e-8).unwrap();
        let (v, _) = linmax_orbitope(&o, &SymmetricMatrix::identity(3)).unwrap();
        assert!((v - o.trace()).abs() < 1e-12);
        let (v, z) = linmax_orbitope(&o, &o.diagonal_point()).unwrap();
        assert!((v - o.radius().powi(2)).abs() < 1e-12);
        assert!((&z - &o.diagonal_point()).frobenius_norm() < 1e-12);
    }
}
