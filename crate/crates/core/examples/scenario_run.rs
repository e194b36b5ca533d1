//! Full scenario run with checkpoints and artifacts: a scaled-down ring.
//!
//! cargo run --release --example scenario_run -- /tmp/ring-run

use std::path::PathBuf;

use wavecast::harness::{run_scenario, RunOptions, Scenario};

fn main() -> wavecast::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "ring-run".into()));
    let mut sc = Scenario::ring();
    sc.solvers.m_list = vec![1000, 2000];
    let res = run_scenario(&sc, &RunOptions { out_dir: Some(out.clone()), ..Default::default() })?;
    print!("{}", res.report.summary());
    for f in ["scenario.toml", "reference.csv", "lanczos.csv", "lanczos.ckpt", "report.json"] {
        println!("  {}", out.join(f).display());
    }
    Ok(())
}
