//! Undirected simple graphs and the few-eigenvalue families used as planted
//! subgraphs.
//!
//! Vertex labelings are fixed: subsets are enumerated in lexicographic
//! order, Hamming tuples in row-major order (first coordinate most
//! significant), Clebsch vertices as 4-bit strings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::SymmetricMatrix;

/// Generators refuse to build graphs with more vertices than this.
pub const MAX_VERTICES: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
        }
    }

    /// Builds a graph from `(i, j)` pairs; order within a pair is irrelevant.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i},{j}) out of range for n={n}")));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at {i}")));
            }
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    fn from_predicate(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if adjacent(i, j) {
                    g.set_edge(i, j, true);
                }
            }
        }
        g
    }

    pub(crate) fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        self.adj[i * self.n + j] = present;
        self.adj[j * self.n + i] = present;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i * self.n..(i + 1) * self.n].iter().filter(|&&b| b).count()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.has_edge(i, j)).collect()
    }

    /// `Some(d)` if every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|i| self.degree(i) == d).then_some(d)
    }

    pub fn adjacency(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.n, |i, j| if self.has_edge(i, j) { 1.0 } else { 0.0 })
    }

    pub fn complement(&self) -> Graph {
        Graph::from_predicate(self.n, |i, j| !self.has_edge(i, j))
    }

    /// Induced subgraph; vertex `a` of the result is `vertices[a]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        Graph::from_predicate(vertices.len(), |a, b| self.has_edge(vertices[a], vertices[b]))
    }

    /// Relabeled copy in which vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::invalid("permutation length differs from vertex count"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.set_edge(perm[i], perm[j], true);
        }
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..self.n {
                if self.has_edge(v, w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Renders the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Parses the edge-list text format: a header `n m` followed by `m`
    /// lines `i j`. Text after `#` is ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut g = Graph::empty(0);
        let mut seen = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let err = |message: String| Error::Parse { line: lineno, message };
            let fields = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| err(format!("bad integer {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if fields.len() != 2 {
                return Err(err(format!("expected two integers, found {}", fields.len())));
            }
            let (a, b) = (fields[0], fields[1]);
            match header {
                None => {
                    if a > MAX_VERTICES {
                        return Err(err(format!("vertex count {a} exceeds {MAX_VERTICES}")));
                    }
                    header = Some((a, b));
                    g = Graph::empty(a);
                }
                Some((n, _)) => {
                    if a >= n || b >= n {
                        return Err(err(format!("edge ({a},{b}) index out of range for n={n}")));
                    }
                    if a == b {
                        return Err(err(format!("self-loop at {a}")));
                    }
                    if g.has_edge(a, b) {
                        return Err(err(format!("duplicate edge ({a},{b})")));
                    }
                    g.set_edge(a, b, true);
                    seen += 1;
                }
            }
        }
        let (_, m) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        if seen != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("header declares {m} edges, found {seen}"),
            });
        }
        Ok(g)
    }
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::parse_edge_list(&fs::read_to_string(path)?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, g.to_edge_list())?;
    Ok(())
}

fn guard(n: u128) -> Result<usize> {
    if n > MAX_VERTICES as u128 {
        return Err(Error::invalid(format!(
            "graph would have {n} vertices, limit is {MAX_VERTICES}"
        )));
    }
    Ok(n as usize)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `l`-subsets of `0..m` in lexicographic order.
pub(crate) fn subsets(m: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..l).collect();
    if l > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = l;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < m - l + i {
                cur[i] += 1;
                for j in (i + 1)..l {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Complete graph `K_k`.
pub fn gen_clique(k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::invalid("clique size must be positive"));
    }
    guard(k as u128)?;
    Ok(Graph::from_predicate(k, |_, _| true))
}

/// Triangular graph `T_m`: 2-subsets of `{0..m}` adjacent iff they meet.
pub fn gen_triangular(m: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::invalid(format!("triangular graph needs m >= 3, got {m}")));
    }
    guard(binomial(m, 2))?;
    let verts = subsets(m, 2);
    Ok(Graph::from_predicate(verts.len(), |a, b| {
        verts[a].iter().any(|x| verts[b].contains(x))
    }))
}

/// Kneser graph `K(m, l)`: `l`-subsets adjacent iff disjoint.
pub fn gen_kneser(m: usize, l: usize) -> Result<Graph> {
    if l == 0 || m < 2 * l {
        return Err(Error::invalid(format!("Kneser graph needs m >= 2l >= 2, got ({m},{l})")));
    }
    guard(binomial(m, l))?;
    let verts = subsets(m, l);
    Ok(Graph::from_predicate(verts.len(), |a, b| {
        !verts[a].iter().any(|x| verts[b].contains(x))
    }))
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// Paley graph on a prime `q ≡ 1 (mod 4)`.
pub fn gen_paley(q: usize) -> Result<Graph> {
    if !is_prime(q) || q % 4 != 1 {
        return Err(Error::invalid(format!(
            "Paley graph needs a prime q ≡ 1 mod 4, got {q}"
        )));
    }
    guard(q as u128)?;
    let mut square = vec![false; q];
    for x in 1..q {
        square[x * x % q] = true;
    }
    Ok(Graph::from_predicate(q, |i, j| square[(j - i) % q]))
}

/// Clebsch graph: 4-bit strings adjacent iff they differ in one bit or in all four.
pub fn gen_clebsch() -> Graph {
    Graph::from_predicate(16, |i, j| matches!((i ^ j).count_ones(), 1 | 4))
}

/// Collinearity graph of GQ(2,4) (the 27 lines on a cubic surface).
///
/// Labels: `e_1..e_6` are vertices `0..6`, `g_1..g_6` are `6..12`, and
/// `f_{ij}` for `i < j` follow in lexicographic order from `12`.
pub fn gen_gq24() -> Graph {
    #[derive(Clone, Copy)]
    enum Line {
        E(usize),
        G(usize),
        F(usize, usize),
    }
    let mut lines: Vec<Line> = (0..6).map(Line::E).collect();
    lines.extend((0..6).map(Line::G));
    for s in subsets(6, 2) {
        lines.push(Line::F(s[0], s[1]));
    }
    Graph::from_predicate(lines.len(), |a, b| match (lines[a], lines[b]) {
        (Line::E(i), Line::G(j)) | (Line::G(j), Line::E(i)) => i != j,
        (Line::E(i), Line::F(j, k))
        | (Line::F(j, k), Line::E(i))
        | (Line::G(i), Line::F(j, k))
        | (Line::F(j, k), Line::G(i)) => i == j || i == k,
        (Line::F(i, j), Line::F(k, l)) => i != k && i != l && j != k && j != l,
        _ => false,
    })
}

/// Hamming graph `H(d, q)`: `q^d` tuples adjacent at Hamming distance one.
pub fn gen_hamming(d: usize, q: usize) -> Result<Graph> {
    if d == 0 || q < 2 {
        return Err(Error::invalid(format!("Hamming graph needs d >= 1, q >= 2, got ({d},{q})")));
    }
    let size = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    let n = guard(size)?;
    let digits = |mut v: usize| {
        let mut out = vec![0; d];
        for slot in out.iter_mut().rev() {
            *slot = v % q;
            v /= q;
        }
        out
    };
    let tuples: Vec<Vec<usize>> = (0..n).map(digits).collect();
    Ok(Graph::from_predicate(n, |a, b| {
        tuples[a].iter().zip(&tuples[b]).filter(|(x, y)| x != y).count() == 1
    }))
}

pub fn gen_hypercube(d: usize) -> Result<Graph> {
    gen_hamming(d, 2)
}

/// Vertex labels matching the generator conventions above, for reports.
pub fn subset_labels(m: usize, l: usize) -> Vec<Vec<usize>> {
    subsets(m, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cliques() {
        assert_eq!(gen_clique(3).unwrap().edge_count(), 3);
        assert_eq!(gen_clique(1).unwrap().edge_count(), 0);
        assert!(gen_clique(0).is_err());
    }

    #[test]
    fn triangular_three_is_triangle() {
        assert_eq!(gen_triangular(3).unwrap(), gen_clique(3).unwrap());
        assert!(gen_triangular(2).is_err());
    }

    #[test]
    fn kneser_special_cases() {
        let petersen = gen_kneser(5, 2).unwrap();
        assert_eq!(petersen.n(), 10);
        assert_eq!(petersen.edge_count(), 15);
        assert_eq!(petersen.regular_degree(), Some(3));
        assert_eq!(gen_kneser(6, 1).unwrap(), gen_clique(6).unwrap());
        assert!(gen_kneser(3, 2).is_err());
    }

    #[test]
    fn paley_five_is_a_cycle() {
        let g = gen_paley(5).unwrap();
        assert_eq!(g.regular_degree(), Some(2));
        assert!(g.is_connected());
        assert!(gen_paley(8).is_err());
        assert!(gen_paley(7).is_err());
        assert!(gen_paley(9).is_err());
    }

    #[test]
    fn clebsch_neighbors_of_zero() {
        let g = gen_clebsch();
        assert_eq!(g.neighbors(0), vec![1, 2, 4, 8, 15]);
        assert_eq!(g.regular_degree(), Some(5));
    }

    #[test]
    fn gq24_first_neighborhood() {
        let g = gen_gq24();
        assert_eq!(g.n(), 27);
        assert_eq!(g.regular_degree(), Some(10));
        // g_2..g_6 are 7..11, f_12..f_16 are 12..16
        let expected: Vec<usize> = (7..12).chain(12..17).collect();
        assert_eq!(g.neighbors(0), expected);
    }

    #[test]
    fn hamming_shapes() {
        assert_eq!(gen_hamming(1, 2).unwrap(), gen_clique(2).unwrap());
        let h33 = gen_hamming(3, 3).unwrap();
        assert_eq!(h33.n(), 27);
        assert_eq!(h33.regular_degree(), Some(6));
        assert!(gen_hamming(20, 2).is_err());
        assert!(gen_hamming(0, 2).is_err());
    }

    #[test]
    fn complement_of_triangular_six_is_kneser() {
        assert_eq!(gen_triangular(6).unwrap().complement(), gen_kneser(6, 2).unwrap());
        let k = gen_clique(5).unwrap();
        assert_eq!(k.complement().edge_count(), 0);
        assert_eq!(k.complement().complement(), k);
    }

    #[test]
    fn parse_path_graph() {
        let g = Graph::parse_edge_list("3 2\n0 1\n1 2").unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Graph::parse_edge_list("2 1\n0 2") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match Graph::parse_edge_list("# c\n3 2\n0 1\n1 0") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Graph::parse_edge_list("3 1\n0 x").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1").is_err());
        assert!(Graph::parse_edge_list("3 1\n1 1").is_err());
    }

    #[test]
    fn comments_are_ignored() {
        let g = Graph::parse_edge_list("# header\n3 1 # trailing\n\n0 2\n#V 1 2\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn relabel_rejects_non_permutations() {
        let g = gen_clique(3).unwrap();
        assert!(g.relabel(&[0, 0, 1]).is_err());
        assert!(g.relabel(&[0, 1]).is_err());
    }
}
