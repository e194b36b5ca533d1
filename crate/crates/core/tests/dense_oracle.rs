use nalgebra::DVector;
use wavecast::dense::sctde_dense;
use wavecast::grid::{build_axis, build_grid2d, Grid2D};
use wavecast::lanczos::{bilanczos, LanczosOptions};
use wavecast::operator::{assemble, sample_source, MediumMap};
use wavecast::sctde::{Propagator, SctdeEvaluator};
use wavecast::stieltjes::to_continued_fraction;
use wavecast::zolotarev::{zolotarev_approx, SpectralInterval};

fn small_grid(n_int: usize, k: usize) -> Grid2D {
    let iv = SpectralInterval::new(-((n_int * n_int) as f64), -1.0).unwrap();
    let steps = to_continued_fraction(&zolotarev_approx(&iv, k).unwrap()).unwrap();
    build_grid2d(build_axis(n_int, &steps).unwrap())
}

#[test]
fn full_lanczos_matches_dense_exponential() {
    let grid = small_grid(6, 2);
    let medium = MediumMap::from_fn(&grid, |x, y| if x * x + y * y < 0.3 { 3.0 } else { 1.0 });
    let op = assemble(&grid, &medium).unwrap();
    let b = sample_source(&grid, (0.0, 0.0), 1.0).unwrap();
    let probes: Vec<usize> = (0..op.n).collect();
    let dec = bilanczos(&op, &b.values, op.n, &probes, &LanczosOptions::default()).unwrap();
    let eval = SctdeEvaluator::new(&dec, op.n).unwrap();
    let times: Vec<f64> = (0..20).map(|j| 0.1 * j as f64).collect();
    let got = eval.evaluate_at(&times, Propagator::Corrected).unwrap();
    let want = sctde_dense(&op.to_dense(), &DVector::from_vec(b.values.clone()), &times).unwrap();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (j, w) in want.iter().enumerate() {
        for p in 0..op.n {
            num += (got[p][j] - w[p].re).powi(2);
            den += w[p].re.powi(2);
        }
    }
    let rel = (num / den).sqrt();
    println!("N = {}, relative error {rel:e}", op.n);
    assert!(rel < 1e-8);
}
