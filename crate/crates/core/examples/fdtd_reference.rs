//! Yee-grid reference: a point source in free space, first arrival and
//! trace written to stdout as CSV.
//!
//! cargo run --release --example fdtd_reference > trace.csv

use wavecast::reference::{fdtd_solve, FdtdConfig, Raster};
use wavecast::signal::make_wavelet;

fn main() -> wavecast::Result<()> {
    let q = make_wavelet(4.0, 30.0, -30.0)?;
    let raster = Raster::square(1.0, 200, |_, _| 1.0);
    let cfg = FdtdConfig { cell: raster.cell, duration: 3.0, ..Default::default() };
    let res = fdtd_solve(&raster, (0.0, 0.0), 1.0, &q, &[(0.5, 0.0)], &cfg)?;
    let peak = res.waveform.samples[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eprintln!("{} steps of {:.4e}; peak |E| = {peak:.4e}", res.steps, res.dt);
    res.waveform.write_csv(std::io::stdout().lock())
}
