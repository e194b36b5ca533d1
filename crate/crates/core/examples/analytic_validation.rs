//! Lanczos trace in free space against the closed-form response, on a
//! reduced grid.
//!
//! cargo run --release --example analytic_validation

use wavecast::harness::{convergence_study, ReferenceKind, RunOptions, Scenario};

fn main() -> wavecast::Result<()> {
    let mut sc = Scenario::homogeneous();
    sc.name = "homogeneous-small".into();
    sc.units.length = 3.0e-6;
    let d = 1.2e-6;
    sc.probes = vec![[d, d]];
    sc.window = 1.2e-13;
    sc.discretization.n_int = 170;
    sc.solvers.reference = ReferenceKind::Analytic;
    let report = convergence_study(&sc, &[500, 1000, 2000, 3000], &RunOptions::default())?;
    print!("{}", report.summary());
    Ok(())
}
