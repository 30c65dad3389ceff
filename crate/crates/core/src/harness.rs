//! Planted-subgraph instances under the Erdős–Rényi noise model, the
//! `γ` selection rule and seeded phase-transition sweeps.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graphs::{
    gen_clebsch, gen_clique, gen_gq24, gen_hamming, gen_hypercube, gen_kneser, gen_paley, gen_triangular,
    Graph,
};
use crate::solver::{check_recovery, solve, SolveParams, SolveStatus};
use crate::spectral::{eig_sym, eigengap, SymmetricMatrix, DEFAULT_GROUP_TOL};

/// An observed graph containing a hidden copy of `planted`.
///
/// `hidden_set` is sorted; `hidden_perm[a]` is the planted label carried by
/// observed vertex `hidden_set[a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedInstance {
    pub observed: Graph,
    pub planted: Graph,
    pub hidden_set: Vec<usize>,
    pub hidden_perm: Vec<usize>,
    pub p: f64,
    pub seed: u64,
}

impl PlantedInstance {
    /// Checks the structural invariants and builds an instance.
    pub fn new(
        observed: Graph,
        planted: Graph,
        hidden_set: Vec<usize>,
        hidden_perm: Vec<usize>,
        p: f64,
        seed: u64,
    ) -> Result<Self> {
        let (n, k) = (observed.n(), planted.n());
        if hidden_set.len() != k || hidden_perm.len() != k {
            return Err(Error::invalid(format!(
                "hidden set has {} entries and perm {}, planted graph has {k}",
                hidden_set.len(),
                hidden_perm.len()
            )));
        }
        if hidden_set.windows(2).any(|w| w[0] >= w[1]) || hidden_set.iter().any(|&v| v >= n) {
            return Err(Error::invalid("hidden set must be strictly increasing and inside 0..n"));
        }
        let mut seen = vec![false; k];
        for &l in &hidden_perm {
            if l >= k || std::mem::replace(&mut seen[l], true) {
                return Err(Error::invalid("hidden perm is not a permutation"));
            }
        }
        let inst = Self {
            observed,
            planted,
            hidden_set,
            hidden_perm,
            p,
            seed,
        };
        if inst.recovered_planted() != inst.planted {
            return Err(Error::invalid("observed graph does not contain the planted graph on the hidden set"));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.observed.n()
    }

    pub fn k(&self) -> usize {
        self.planted.n()
    }

    /// `embedding[label]` is the observed vertex carrying that planted label.
    pub fn embedding(&self) -> Vec<usize> {
        let mut emb = vec![0; self.k()];
        for (a, &l) in self.hidden_perm.iter().enumerate() {
            emb[l] = self.hidden_set[a];
        }
        emb
    }

    /// The planted graph read back from the observed graph through the labeling.
    fn recovered_planted(&self) -> Graph {
        let emb = self.embedding();
        let k = self.k();
        let edges = (0..k)
            .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
            .filter(|&(a, b)| self.observed.has_edge(emb[a], emb[b]));
        Graph::from_edges(k, edges).expect("labels are in range")
    }

    /// Ground truth: `A_Γ − γI` on the hidden set in the hidden labeling,
    /// zero elsewhere.
    pub fn planted_matrix(&self, gamma: f64) -> SymmetricMatrix {
        let emb = self.embedding();
        let mut m = SymmetricMatrix::zeros(self.n());
        for a in 0..self.k() {
            m.set(emb[a], emb[a], -gamma);
            for b in (a + 1)..self.k() {
                if self.planted.has_edge(a, b) {
                    m.set(emb[a], emb[b], 1.0);
                }
            }
        }
        m
    }

    /// Applies the vertex map `v → perm[v]` to the observed graph.
    pub fn relabel(&self, perm: &[usize]) -> Result<PlantedInstance> {
        let observed = self.observed.relabel(perm)?;
        let mut pairs: Vec<(usize, usize)> = self
            .hidden_set
            .iter()
            .zip(&self.hidden_perm)
            .map(|(&v, &l)| (perm[v], l))
            .collect();
        pairs.sort_unstable();
        let (hidden_set, hidden_perm) = pairs.into_iter().unzip();
        PlantedInstance::new(observed, self.planted.clone(), hidden_set, hidden_perm, self.p, self.seed)
    }

    /// Edge list followed by the `#planted`, `#V`, `#perm`, `#p` and `#seed`
    /// trailer lines.
    pub fn to_instance_file(&self) -> String {
        let mut out = self.observed.to_edge_list();
        let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "#planted {}", self.k());
        let _ = writeln!(out, "#V {}", join(&self.hidden_set));
        let _ = writeln!(out, "#perm {}", join(&self.hidden_perm));
        let _ = writeln!(out, "#p {:?}", self.p);
        let _ = writeln!(out, "#seed {}", self.seed);
        out
    }

    pub fn parse_instance_file(text: &str) -> Result<PlantedInstance> {
        let observed = Graph::parse_edge_list(text)?;
        let mut k = None;
        let mut set = None;
        let mut perm = None;
        let mut p = None;
        let mut seed = None;
        for (lineno, raw) in text.lines().enumerate() {
            let Some(rest) = raw.trim().strip_prefix('#') else {
                continue;
            };
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let mut fields = rest.split_whitespace();
            let key = fields.next().unwrap_or("");
            let values: Vec<&str> = fields.collect();
            let ints = || {
                values
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|e| err(format!("bad integer {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()
            };
            let single = || -> Result<&str> {
                match values.as_slice() {
                    [v] => Ok(v),
                    _ => Err(err(format!("#{key} takes one value"))),
                }
            };
            match key {
                "planted" => k = Some(single()?.parse::<usize>().map_err(|e| err(e.to_string()))?),
                "V" => set = Some(ints()?),
                "perm" => perm = Some(ints()?),
                "p" => p = Some(single()?.parse::<f64>().map_err(|e| err(e.to_string()))?),
                "seed" => seed = Some(single()?.parse::<u64>().map_err(|e| err(e.to_string()))?),
                _ => {}
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            message: format!("instance trailer lacks #{what}"),
        };
        let k = k.ok_or_else(|| missing("planted"))?;
        let hidden_set = set.ok_or_else(|| missing("V"))?;
        let hidden_perm = perm.ok_or_else(|| missing("perm"))?;
        if hidden_set.len() != k {
            return Err(Error::invalid(format!("#planted {k} but #V lists {}", hidden_set.len())));
        }
        let mut probe = Self {
            observed,
            planted: Graph::empty(k),
            hidden_set,
            hidden_perm,
            p: p.ok_or_else(|| missing("p"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
        };
        if probe.hidden_perm.len() != k {
            return Err(Error::invalid(format!("#planted {k} but #perm lists {}", probe.hidden_perm.len())));
        }
        let mut labels = probe.hidden_perm.clone();
        labels.sort_unstable();
        if labels != (0..k).collect::<Vec<_>>() {
            return Err(Error::invalid("#perm is not a permutation"));
        }
        probe.planted = probe.recovered_planted();
        let PlantedInstance {
            observed,
            planted,
            hidden_set,
            hidden_perm,
            p,
            seed,
        } = probe;
        PlantedInstance::new(observed, planted, hidden_set, hidden_perm, p, seed)
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<PlantedInstance> {
    PlantedInstance::parse_instance_file(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &PlantedInstance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, inst.to_instance_file())?;
    Ok(())
}

/// Hides `planted` among `n` vertices and adds Bernoulli(`p`) noise on every
/// pair with at least one endpoint outside the hidden set.
pub fn plant(planted: &Graph, n: usize, p: f64, seed: u64) -> Result<PlantedInstance> {
    let k = planted.n();
    if n < k {
        return Err(Error::invalid(format!("n = {n} is smaller than k = {k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let embedding = &order[..k];

    let mut in_v = vec![false; n];
    for &v in embedding {
        in_v[v] = true;
    }
    let mut observed = Graph::empty(n);
    for (a, b) in planted.edges() {
        observed.set_edge(embedding[a], embedding[b], true);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !(in_v[i] && in_v[j]) && rng.random_bool(p) {
                observed.set_edge(i, j, true);
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = embedding.iter().enumerate().map(|(l, &v)| (v, l)).collect();
    pairs.sort_unstable();
    let (hidden_set, hidden_perm) = pairs.into_iter().unzip();
    Ok(PlantedInstance {
        observed,
        planted: planted.clone(),
        hidden_set,
        hidden_perm,
        p,
        seed,
    })
}

/// Eigenvalue of `A_Γ` with the largest multiplicity; ties go to the larger
/// eigengap, then to the larger eigenvalue.
pub fn gamma_policy(planted: &Graph) -> Result<f64> {
    let adj = planted.adjacency();
    let d = eig_sym(&adj, DEFAULT_GROUP_TOL)?;
    if d.is_empty() {
        return Err(Error::invalid("graph has no vertices"));
    }
    let tie = 1e-9 * adj.spectral_norm()?.max(1.0);
    let mut best = 0;
    for i in 1..d.len() {
        let (mi, mb) = (d.multiplicities[i], d.multiplicities[best]);
        let better = if mi != mb {
            mi > mb
        } else {
            let (gi, gb) = (eigengap(&d, i)?, eigengap(&d, best)?);
            if (gi - gb).abs() > tie {
                gi > gb
            } else {
                d.distinct_values[i] > d.distinct_values[best]
            }
        };
        if better {
            best = i;
        }
    }
    Ok(d.distinct_values[best])
}

/// A named graph family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum FamilySpec {
    Clique { k: usize },
    Triangular { m: usize },
    Kneser { m: usize, l: usize },
    Paley { q: usize },
    Clebsch,
    Gq24,
    Hamming { d: usize, q: usize },
    Hypercube { d: usize },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            FamilySpec::Clique { k } => gen_clique(k),
            FamilySpec::Triangular { m } => gen_triangular(m),
            FamilySpec::Kneser { m, l } => gen_kneser(m, l),
            FamilySpec::Paley { q } => gen_paley(q),
            FamilySpec::Clebsch => Ok(gen_clebsch()),
            FamilySpec::Gq24 => Ok(gen_gq24()),
            FamilySpec::Hamming { d, q } => gen_hamming(d, q),
            FamilySpec::Hypercube { d } => gen_hypercube(d),
        }
    }

    /// Short label used in the `family` CSV column.
    pub fn label(&self) -> String {
        match *self {
            FamilySpec::Clique { k } => format!("clique{k}"),
            FamilySpec::Triangular { m } => format!("triangular{m}"),
            FamilySpec::Kneser { m, l } => format!("kneser{m}_{l}"),
            FamilySpec::Paley { q } => format!("paley{q}"),
            FamilySpec::Clebsch => "clebsch".into(),
            FamilySpec::Gq24 => "gq24".into(),
            FamilySpec::Hamming { d, q } => format!("hamming{d}_{q}"),
            FamilySpec::Hypercube { d } => format!("hypercube{d}"),
        }
    }
}

/// Solver settings as they appear in a sweep file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub rho: f64,
    pub max_iter: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = SolveParams::default();
        Self {
            rho: d.rho,
            max_iter: d.max_iter,
            eps_abs: d.eps_abs,
            eps_rel: d.eps_rel,
        }
    }
}

impl SolverSettings {
    pub fn with_gamma(&self, gamma: f64) -> SolveParams {
        SolveParams {
            rho: self.rho,
            max_iter: self.max_iter,
            eps_abs: self.eps_abs,
            eps_rel: self.eps_rel,
            gamma,
        }
    }
}

fn default_tol_rec() -> f64 {
    1e-3
}

/// Sweep description, read from TOML.
///
/// `gamma` absent selects [`gamma_policy`]. `record_timing = false` writes
/// `wall_ms = 0` so reruns are byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: FamilySpec,
    #[serde(default)]
    pub gamma: Option<f64>,
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub trials: usize,
    #[serde(default = "default_tol_rec")]
    pub tol_rec: f64,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub record_timing: bool,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.p.is_empty() {
            return Err(Error::invalid("n and p grids must be nonempty"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if let Some(&p) = self.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("p = {p} outside [0, 1]")));
        }
        if !(self.tol_rec > 0.0) {
            return Err(Error::invalid("tol_rec must be positive"));
        }
        Ok(())
    }
}

pub fn load_sweep_config(path: impl AsRef<Path>) -> Result<SweepConfig> {
    SweepConfig::from_toml(&fs::read_to_string(path)?)
}

/// Per-trial seed: the first eight bytes (little endian) of
/// SHA-256(`base_seed ‖ n ‖ bits(p) ‖ trial`), each field as a little-endian u64.
pub fn trial_seed(base_seed: u64, n: usize, p: f64, trial: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update((n as u64).to_le_bytes());
    h.update(p.to_bits().to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// One CSV row; field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub k: usize,
    pub n: usize,
    pub p: f64,
    pub trial: usize,
    pub seed: u64,
    pub gamma: f64,
    pub success: bool,
    pub objective: f64,
    pub iterations: usize,
    pub primal_res: f64,
    pub dual_res: f64,
    pub status: String,
    pub wall_ms: u64,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "family",
    "k",
    "n",
    "p",
    "trial",
    "seed",
    "gamma",
    "success",
    "objective",
    "iterations",
    "primal_res",
    "dual_res",
    "status",
    "wall_ms",
];

/// Runs every `(n, p, trial)` cell. Rows come back in grid order whatever
/// the execution order; per-trial failures land in the `status` column.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let planted = config.family.build()?;
    let gamma = match config.gamma {
        Some(g) => g,
        None => gamma_policy(&planted)?,
    };
    let label = config.family.label();
    let cells: Vec<(usize, f64, usize)> = config
        .n
        .iter()
        .flat_map(|&n| {
            config
                .p
                .iter()
                .flat_map(move |&p| (0..config.trials).map(move |t| (n, p, t)))
        })
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(n, p, trial)| {
            let seed = trial_seed(config.base_seed, n, p, trial);
            let start = Instant::now();
            let mut row = SweepRow {
                family: label.clone(),
                k: planted.n(),
                n,
                p,
                trial,
                seed,
                gamma,
                success: false,
                objective: f64::NAN,
                iterations: 0,
                primal_res: f64::NAN,
                dual_res: f64::NAN,
                status: String::new(),
                wall_ms: 0,
            };
            let outcome = plant(&planted, n, p, seed).and_then(|inst| {
                let report = solve(&inst, &config.solver.with_gamma(gamma))?;
                let ok = check_recovery(&report, &inst, config.tol_rec);
                Ok((report, ok))
            });
            match outcome {
                Ok((report, ok)) => {
                    row.success = ok;
                    row.objective = report.objective;
                    row.iterations = report.iterations;
                    row.primal_res = report.primal_res;
                    row.dual_res = report.dual_res;
                    row.status = match report.status {
                        SolveStatus::Converged => "converged".into(),
                        SolveStatus::MaxIter => "max-iter".into(),
                    };
                }
                Err(e) => row.status = format!("error: {e}"),
            }
            if config.record_timing {
                row.wall_ms = start.elapsed().as_millis() as u64;
            }
            row
        })
        .collect();
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

/// Fraction of successful trials per `(n, p)` cell, in grid order.
pub fn success_rates(rows: &[SweepRow]) -> Vec<(usize, f64, f64)> {
    let mut out: Vec<(usize, f64, usize, usize)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|c| c.0 == r.n && c.1 == r.p) {
            Some(c) => {
                c.2 += usize::from(r.success);
                c.3 += 1;
            }
            None => out.push((r.n, r.p, usize::from(r.success), 1)),
        }
    }
    out.into_iter().map(|(n, p, s, t)| (n, p, s as f64 / t as f64)).collect()
}
