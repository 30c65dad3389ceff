use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use schurhorn::certificate::{build_certificate, theorem_bounds, verify_certificate};
use schurhorn::graphs::{binomial, load_graph, save_graph};
use schurhorn::harness::{
    gamma_policy, load_instance, load_sweep_config, plant, run_sweep, save_instance, write_csv, FamilySpec,
};
use schurhorn::invariants::{coherence, default_ell, invariant_report, Eigenspace, WidthMode, DEFAULT_SUBSET_BUDGET};
use schurhorn::sdpa::export_sdpa;
use schurhorn::solver::{check_recovery, solve, SolveParams};
use schurhorn::{Error, Result};

#[derive(Parser)]
#[command(name = "schurhorn", version, about = "Planted subgraph recovery via the Schur-Horn orbitope")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Clique,
    Triangular,
    Kneser,
    Paley,
    Clebsch,
    Gq24,
    Hamming,
    Hypercube,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaPolicy {
    MaxMult,
}

#[derive(Subcommand)]
enum Command {
    /// Write a family graph as an edge list.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Clique size.
        #[arg(long)]
        k: Option<usize>,
        /// Ground-set size for triangular and Kneser graphs.
        #[arg(long)]
        m: Option<usize>,
        /// Subset size for Kneser graphs.
        #[arg(long)]
        l: Option<usize>,
        /// Prime for Paley graphs, alphabet size for Hamming graphs.
        #[arg(long)]
        q: Option<usize>,
        /// Dimension for Hamming graphs and hypercubes.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hide a graph in an Erdős–Rényi background.
    Plant {
        #[arg(long)]
        planted: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the ADMM solver and report recovery.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, conflicts_with = "gamma_policy")]
        gamma: Option<f64>,
        #[arg(long, value_enum)]
        gamma_policy: Option<GammaPolicy>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        eps_abs: Option<f64>,
        #[arg(long)]
        eps_rel: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol_rec: f64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Build and verify the dual certificate; attach the recovery bound.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eigenvalue: f64,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print eigenspace invariants as JSON.
    Invariants {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eigenvalue: f64,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long)]
        mc_samples: Option<usize>,
    },
    /// Run a TOML-configured sweep and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the relaxation in SDPA sparse format.
    ExportSdpa {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn need(v: Option<usize>, flag: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for this family")))
}

fn family_spec(family: Family, k: Option<usize>, m: Option<usize>, l: Option<usize>, q: Option<usize>, d: Option<usize>) -> Result<FamilySpec> {
    Ok(match family {
        Family::Clique => FamilySpec::Clique { k: need(k, "k")? },
        Family::Triangular => FamilySpec::Triangular { m: need(m, "m")? },
        Family::Kneser => FamilySpec::Kneser {
            m: need(m, "m")?,
            l: need(l, "l")?,
        },
        Family::Paley => FamilySpec::Paley { q: need(q, "q")? },
        Family::Clebsch => FamilySpec::Clebsch,
        Family::Gq24 => FamilySpec::Gq24,
        Family::Hamming => FamilySpec::Hamming {
            d: need(d, "d")?,
            q: need(q, "q")?,
        },
        Family::Hypercube => FamilySpec::Hypercube { d: need(d, "d")? },
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { family, k, m, l, q, d, out } => {
            save_graph(&family_spec(family, k, m, l, q, d)?.build()?, out)?;
        }
        Command::Plant { planted, n, p, seed, out } => {
            save_instance(&plant(&load_graph(planted)?, n, p, seed)?, out)?;
        }
        Command::Solve {
            instance,
            gamma,
            gamma_policy: _,
            rho,
            max_iter,
            eps_abs,
            eps_rel,
            tol_rec,
            report,
        } => {
            let inst = load_instance(instance)?;
            let gamma = match gamma {
                Some(g) => g,
                None => gamma_policy(&inst.planted)?,
            };
            let d = SolveParams::with_gamma(gamma);
            let params = SolveParams {
                rho: rho.unwrap_or(d.rho),
                max_iter: max_iter.unwrap_or(d.max_iter),
                eps_abs: eps_abs.unwrap_or(d.eps_abs),
                eps_rel: eps_rel.unwrap_or(d.eps_rel),
                gamma,
            };
            let rep = solve(&inst, &params)?;
            let ok = check_recovery(&rep, &inst, tol_rec);
            fs::write(report, rep.to_json(Some(ok)))?;
            println!("status={:?} iterations={} recovered={ok}", rep.status, rep.iterations);
        }
        Command::Certify {
            instance,
            eigenvalue,
            margin,
            c2,
            report,
        } => {
            let inst = load_instance(instance)?;
            let e = Eigenspace::of_graph(&inst.planted, eigenvalue)?;
            let cert = build_certificate(&inst, &e)?;
            let verdict = verify_certificate(&cert, &inst, e.lambda(), margin)?;
            let k = inst.k();
            let ell = default_ell(k, inst.p, coherence(&e)?);
            let exact_cost: u128 = (0..=ell).map(|i| binomial(k, i)).sum();
            let mode = if exact_cost <= DEFAULT_SUBSET_BUDGET {
                WidthMode::Exact
            } else {
                WidthMode::MonteCarlo { samples: 100_000, seed: inst.seed }
            };
            let bounds = match theorem_bounds(&inst.planted, &e, inst.n(), inst.p, ell, c2, mode) {
                Ok(b) => serde_json::to_value(b).expect("bound report serializes"),
                Err(err) => json!({ "error": err.to_string() }),
            };
            let doc = json!({ "certificate": verdict, "bounds": bounds });
            fs::write(report, serde_json::to_string_pretty(&doc).expect("json"))?;
            println!("certificate overall={}", verdict.overall);
        }
        Command::Invariants {
            graph,
            eigenvalue,
            ell,
            p,
            mc_samples,
        } => {
            let r = invariant_report(&load_graph(graph)?, eigenvalue, ell, p, mc_samples, None)?;
            println!("{}", serde_json::to_string_pretty(&r).expect("json"));
        }
        Command::Sweep { config, out } => {
            let cfg = load_sweep_config(config)?;
            let rows = run_sweep(&cfg)?;
            match out.or(cfg.output) {
                Some(path) => write_csv(&rows, fs::File::create(path)?)?,
                None => write_csv(&rows, io::stdout().lock())?,
            }
        }
        Command::ExportSdpa { instance, gamma, out } => {
            export_sdpa(&load_instance(instance)?, gamma, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
