//! Export of the relaxation as an SDPA sparse (`.dat-s`) problem.
//!
//! The orbitope of a matrix with distinct eigenvalues `λ_1 > … > λ_q`
//! (multiplicities `m_i`) is `{Σ λ_i Y_i : Y_i ⪰ 0, Σ Y_i = I, tr Y_i = m_i}`.
//! The file states the SDPA dual form over `Y = diag(Y_1, …, Y_q)`:
//!
//! ```text
//! maximize   Σ λ_i ⟨A_G, Y_i⟩
//! subject to Σ_i (Y_i)_rs = δ_rs          for r ≤ s
//!            tr Y_i = m_i                 for each block
//!            Σ_i λ_i (Y_i)_rs = 0         for each non-edge r < s
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::harness::PlantedInstance;
use crate::orbitope::make_orbitope;

/// Decimal with 17 significant digits; integers print without exponent.
fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}

/// Block eigenvalues and multiplicities in file order (descending).
pub fn sdpa_blocks(instance: &PlantedInstance, gamma: f64) -> Result<Vec<(f64, usize)>> {
    Ok(make_orbitope(&instance.planted, gamma, instance.n())?.distinct().to_vec())
}

/// Renders the SDPA sparse text for `instance` with spectrum shift `gamma`.
pub fn render_sdpa(instance: &PlantedInstance, gamma: f64) -> Result<String> {
    let blocks = sdpa_blocks(instance, gamma)?;
    let g = &instance.observed;
    let n = g.n();
    let q = blocks.len();
    let non_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|r| ((r + 1)..n).map(move |s| (r, s)))
        .filter(|&(r, s)| !g.has_edge(r, s))
        .collect();
    let identity_count = n * (n + 1) / 2;
    let m = identity_count + q + non_edges.len();

    let mut out = String::new();
    let _ = writeln!(out, "{m}");
    let _ = writeln!(out, "{q}");
    let _ = writeln!(out, "{}", vec![n.to_string(); q].join(" "));
    let mut rhs = Vec::with_capacity(m);
    for r in 0..n {
        for s in r..n {
            rhs.push(if r == s { "1".to_string() } else { "0".to_string() });
        }
    }
    rhs.extend(blocks.iter().map(|&(_, mult)| mult.to_string()));
    rhs.extend(non_edges.iter().map(|_| "0".to_string()));
    let _ = writeln!(out, "{}", rhs.join(" "));

    for (b, &(lam, _)) in blocks.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        for (r, s) in g.edges() {
            let _ = writeln!(out, "0 {} {} {} {}", b + 1, r + 1, s + 1, num(lam));
        }
    }
    let mut matno = 0;
    for r in 0..n {
        for s in r..n {
            matno += 1;
            let v = if r == s { "1" } else { "0.5" };
            for b in 0..q {
                let _ = writeln!(out, "{matno} {} {} {} {v}", b + 1, r + 1, s + 1);
            }
        }
    }
    for b in 0..q {
        matno += 1;
        for r in 0..n {
            let _ = writeln!(out, "{matno} {} {} {} 1", b + 1, r + 1, r + 1);
        }
    }
    for &(r, s) in &non_edges {
        matno += 1;
        for (b, &(lam, _)) in blocks.iter().enumerate() {
            if lam != 0.0 {
                let _ = writeln!(out, "{matno} {} {} {} {}", b + 1, r + 1, s + 1, num(lam / 2.0));
            }
        }
    }
    debug_assert_eq!(matno, m);
    Ok(out)
}

pub fn export_sdpa(instance: &PlantedInstance, gamma: f64, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_sdpa(instance, gamma)?)?;
    Ok(())
}
