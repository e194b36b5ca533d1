//! Full-length bi-Lanczos on a tiny problem against the dense matrix function.
//!
//! cargo run --release --example dense_check

use nalgebra::DVector;
use wavecast::dense::sctde_dense;
use wavecast::grid::{build_axis, build_grid2d};
use wavecast::lanczos::{bilanczos, LanczosOptions};
use wavecast::operator::{assemble, sample_source, MediumMap};
use wavecast::sctde::{Propagator, SctdeEvaluator};
use wavecast::stieltjes::to_continued_fraction;
use wavecast::zolotarev::{zolotarev_approx, SpectralInterval};

fn main() -> wavecast::Result<()> {
    let iv = SpectralInterval::new(-64.0, -1.0)?;
    let grid = build_grid2d(build_axis(8, &to_continued_fraction(&zolotarev_approx(&iv, 2)?)?)?);
    let op = assemble(&grid, &MediumMap::vacuum(&grid))?;
    let b = sample_source(&grid, (0.0, 0.0), 1.0)?;
    let probe = grid.nearest_node(0.5, 0.25)?;
    let dec = bilanczos(&op, &b.values, op.n, &[probe], &LanczosOptions::default())?;
    let eval = SctdeEvaluator::new(&dec, op.n)?;
    let times: Vec<f64> = (0..8).map(|j| 0.25 * j as f64).collect();
    let lanczos = eval.evaluate_at(&times, Propagator::Corrected)?;
    let dense = sctde_dense(&op.to_dense(), &DVector::from_vec(b.values.clone()), &times)?;
    println!("N = {}", op.n);
    println!("    t        lanczos           dense");
    for (j, t) in times.iter().enumerate() {
        println!("{t:5.2}  {:>16.9e}  {:>16.9e}", lanczos[0][j], dense[j][probe].re);
    }
    Ok(())
}
