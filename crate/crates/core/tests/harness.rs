mod common;

use proptest::prelude::*;
use schurhorn::graphs::*;
use schurhorn::harness::*;

fn sweep_toml(extra: &str) -> String {
    format!(
        r#"
n = [24, 40]
p = [0.0, 0.05]
trials = 10
base_seed = 7
{extra}

[family]
name = "clebsch"
"#
    )
}

#[test]
fn sweep_grid_shape_and_noiseless_success() {
    let cfg = SweepConfig::from_toml(&sweep_toml("")).unwrap();
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 40);
    let cells: Vec<(usize, f64, usize)> = rows.iter().map(|r| (r.n, r.p, r.trial)).collect();
    let mut sorted = cells.clone();
    sorted.sort_by(|a, b| (a.0, a.1.to_bits(), a.2).cmp(&(b.0, b.1.to_bits(), b.2)));
    assert_eq!(cells, sorted);
    for r in &rows {
        assert!((r.gamma - 1.0).abs() < 1e-9);
        assert_eq!(r.seed, trial_seed(7, r.n, r.p, r.trial));
        if r.p == 0.0 {
            assert!(r.success, "{r:?}");
        }
    }
    let rates = success_rates(&rows);
    assert_eq!(rates.len(), 4);
    assert!(rates.iter().filter(|c| c.1 == 0.0).all(|c| c.2 == 1.0));
}

#[test]
fn rerun_is_byte_identical() {
    let cfg = SweepConfig::from_toml(&sweep_toml("")).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&run_sweep(&cfg).unwrap(), &mut a).unwrap();
    write_csv(&run_sweep(&cfg).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(
        CSV_COLUMNS.join(","),
        "family,k,n,p,trial,seed,gamma,success,objective,iterations,primal_res,dual_res,status,wall_ms"
    );
    assert_eq!(text.lines().count(), 41);
}

#[test]
fn failures_stay_in_their_rows() {
    // n below k fails in plant, recorded per row
    let text = r#"
n = [10]
p = [0.1]
trials = 2

[family]
name = "clebsch"
"#;
    let rows = run_sweep(&SweepConfig::from_toml(text).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r.success && r.status.starts_with("error")));
}

#[test]
fn config_errors() {
    assert!(SweepConfig::from_toml("n = []\np = [0.1]\ntrials = 1\n[family]\nname = \"clebsch\"").is_err());
    assert!(SweepConfig::from_toml("n = [20]\np = [0.1]\ntrials = 0\n[family]\nname = \"clebsch\"").is_err());
    assert!(SweepConfig::from_toml("n = [20]\np = [1.5]\ntrials = 1\n[family]\nname = \"clebsch\"").is_err());
    assert!(SweepConfig::from_toml("n = [20]\np = [0.1]\ntrials = 1\nbogus = 3\n[family]\nname = \"clebsch\"").is_err());
    let cfg = SweepConfig::from_toml(
        "n = [20]\np = [0.1]\ntrials = 1\ngamma = -2.0\n[family]\nname = \"kneser\"\nm = 6\nl = 2\n[solver]\nrho = 2.0",
    )
    .unwrap();
    assert_eq!(cfg.family, FamilySpec::Kneser { m: 6, l: 2 });
    assert_eq!(cfg.gamma, Some(-2.0));
    assert_eq!(cfg.solver.rho, 2.0);
    assert_eq!(cfg.tol_rec, 1e-3);
}

#[test]
fn gamma_policy_examples() {
    assert_eq!(gamma_policy(&gen_clique(8).unwrap()).unwrap().round(), -1.0);
    assert!((gamma_policy(&gen_clebsch()).unwrap() - 1.0).abs() < 1e-9);
    assert!((gamma_policy(&gen_triangular(8).unwrap()).unwrap() + 2.0).abs() < 1e-9);
}

#[test]
fn background_density_matches_p() {
    let g = gen_clique(5).unwrap();
    let p = 0.3;
    let (n, k) = (150, 5);
    let inst = plant(&g, n, p, 99).unwrap();
    let hidden: Vec<bool> = (0..n).map(|v| inst.hidden_set.contains(&v)).collect();
    let mut pairs = 0usize;
    let mut edges = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if hidden[i] && hidden[j] {
                continue;
            }
            pairs += 1;
            edges += usize::from(inst.observed.has_edge(i, j));
        }
    }
    assert_eq!(pairs, n * (n - 1) / 2 - k * (k - 1) / 2);
    assert!(pairs > 10_000);
    let sd = (pairs as f64 * p * (1.0 - p)).sqrt();
    assert!((edges as f64 - pairs as f64 * p).abs() <= 3.0 * sd);
}

#[test]
fn extreme_noise_levels() {
    let g = gen_kneser(5, 2).unwrap();
    let quiet = plant(&g, 25, 0.0, 3).unwrap();
    assert_eq!(quiet.observed.edge_count(), g.edge_count());
    let loud = plant(&g, 25, 1.0, 3).unwrap();
    assert_eq!(loud.observed.edge_count(), 25 * 24 / 2 - 10 * 9 / 2 + g.edge_count());
    assert!(plant(&g, 9, 0.1, 0).is_err());
    assert!(plant(&g, 20, -0.1, 0).is_err());
}

#[test]
fn planted_copy_is_induced() {
    let g = gen_clebsch();
    let inst = plant(&g, 40, 0.4, 5).unwrap();
    let emb = inst.embedding();
    for a in 0..16 {
        for b in 0..16 {
            if a != b {
                assert_eq!(inst.observed.has_edge(emb[a], emb[b]), g.has_edge(a, b));
            }
        }
    }
}

#[test]
fn instance_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.txt");
    let inst = plant(&gen_paley(13).unwrap(), 30, 0.1, 123).unwrap();
    save_instance(&inst, &path).unwrap();
    assert_eq!(load_instance(&path).unwrap(), inst);
    let text = inst.to_instance_file();
    for tag in ["#planted", "#V", "#perm", "#p", "#seed"] {
        assert!(text.lines().any(|l| l.starts_with(tag)), "{tag}");
    }
    // a trailer that contradicts the planted graph is rejected
    let broken = text.replace("#perm", "#perm_x");
    assert!(PlantedInstance::parse_instance_file(&broken).is_err());
}

#[test]
fn success_drops_with_noise() {
    let cfg = SweepConfig::from_toml(
        "n = [16]\np = [0.0, 0.3]\ntrials = 10\nbase_seed = 3\n[family]\nname = \"clique\"\nk = 8",
    )
    .unwrap();
    let rates = success_rates(&run_sweep(&cfg).unwrap());
    let (quiet, noisy) = (rates[0].2, rates[1].2);
    // binomial standard error at 10 trials with 3σ slack
    let se = (noisy * (1.0 - noisy) / 10.0).sqrt().max((quiet * (1.0 - quiet) / 10.0).sqrt());
    assert!(quiet + 3.0 * se >= noisy);
    assert_eq!(quiet, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plant_is_deterministic(seed in any::<u64>(), p in 0.0f64..1.0) {
        let g = gen_kneser(5, 2).unwrap();
        let a = plant(&g, 18, p, seed).unwrap();
        let b = plant(&g, 18, p, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.hidden_set.len(), 10);
        let mut perm = a.hidden_perm.clone();
        perm.sort_unstable();
        prop_assert_eq!(perm, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn trial_seeds_differ_across_cells(base in any::<u64>(), n in 10usize..100, t in 0usize..50) {
        let s = trial_seed(base, n, 0.1, t);
        prop_assert_ne!(s, trial_seed(base, n, 0.1, t + 1));
        prop_assert_ne!(s, trial_seed(base, n + 1, 0.1, t));
        prop_assert_ne!(s, trial_seed(base, n, 0.2, t));
        prop_assert_eq!(s, trial_seed(base, n, 0.1, t));
    }
}
