//! Stability-corrected versus naive propagator on the same Krylov projection.
//!
//! cargo run --release --example stability

use wavecast::harness::{prepare, Scenario};
use wavecast::lanczos::bilanczos;
use wavecast::sctde::{growth_ratio, SctdeEvaluator};

fn main() -> wavecast::Result<()> {
    let mut sc = Scenario::ring();
    sc.discretization.n_int = 60;
    let prep = prepare(&sc)?;
    let dec = bilanczos(&prep.op, &prep.source.values, 300, &prep.probe_nodes, &prep.lanczos_options())?;
    let eval = SctdeEvaluator::new(&dec, 300)?;
    let window = prep.norm.window;
    for factor in [0.02, 0.05, 0.1, 0.2, 1.0, 10.0] {
        let times: Vec<f64> = (0..=2000).map(|j| factor * window * j as f64 / 2000.0).collect();
        println!("t up to {factor:>5} x window: uncorrected / corrected peak = {:.3e}", growth_ratio(&eval, &times)?);
    }
    Ok(())
}
