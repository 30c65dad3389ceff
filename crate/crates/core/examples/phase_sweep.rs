//! Runs the sweep described in `phase_sweep.toml` and prints success rates
//! per (n, p) cell; the CSV goes to stdout when `--csv` is passed.
//!
//! ```text
//! cargo run --example phase_sweep [-- --csv]
//! ```

use schurhorn::harness::{run_sweep, success_rates, write_csv, SweepConfig};

fn main() -> schurhorn::Result<()> {
    let cfg = SweepConfig::from_toml(include_str!("phase_sweep.toml"))?;
    let rows = run_sweep(&cfg)?;
    if std::env::args().any(|a| a == "--csv") {
        return write_csv(&rows, std::io::stdout().lock());
    }
    println!("{} rows for {}", rows.len(), cfg.family.label());
    for (n, p, rate) in success_rates(&rows) {
        println!("n={n:>3} p={p:<5} success {:>5.1}%", 100.0 * rate);
    }
    Ok(())
}
