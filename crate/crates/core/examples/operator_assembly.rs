//! Composite grid and M-symmetric five-point operator for a dielectric disk.
//!
//! cargo run --release --example operator_assembly

use wavecast::grid::{build_axis, build_grid2d};
use wavecast::operator::{assemble, MediumMap};
use wavecast::stieltjes::to_continued_fraction;
use wavecast::zolotarev::{compute_interval, zolotarev_approx};

fn main() -> wavecast::Result<()> {
    let interval = compute_interval(2.0, 18.0, 0.1)?;
    let steps = to_continued_fraction(&zolotarev_approx(&interval, 6)?)?;
    let grid = build_grid2d(build_axis(40, &steps)?);
    let medium = MediumMap::from_fn(&grid, |x, y| if x * x + y * y < 0.25 { 4.0 } else { 1.0 });
    let op = assemble(&grid, &medium)?;
    println!("unknowns {} ({} per axis), nonzeros {}", op.n, grid.n, op.nnz());
    println!("|A|_inf = {:.3e}, |M|_max = {:.3e}", op.norm_inf(), op.mass_norm());

    // x^T M A y = y^T M A x for the bilinear (unconjugated) form
    let x: Vec<_> = (0..op.n).map(|i| wavecast::C64::new((i as f64).sin(), 0.3)).collect();
    let y: Vec<_> = (0..op.n).map(|i| wavecast::C64::new((i as f64 * 0.7).cos(), -0.1)).collect();
    let (ax, ay) = (op.matvec(&x)?, op.matvec(&y)?);
    let form = |u: &[wavecast::C64], v: &[wavecast::C64]| -> wavecast::C64 {
        u.iter().zip(&op.mass).zip(v).map(|((a, m), b)| a * m * b).sum()
    };
    println!("y^T M A x = {:.6e}", form(&y, &ax));
    println!("x^T M A y = {:.6e}", form(&x, &ay));
    Ok(())
}
