#![allow(dead_code)]

use wavecast::reference::{analytic_homogeneous, fdtd_solve, AnalyticProbe, FdtdConfig, Raster};
use wavecast::signal::{compare_traces, make_wavelet, SourceSignature};

pub fn wavelet() -> SourceSignature {
    make_wavelet(2.0, 20.0, -30.0).unwrap()
}

/// Relative error of the vacuum FDTD trace at `(r, 0)` against the analytic
/// response, for `n` cells across `[-1, 1]`.
pub fn fdtd_vs_analytic(n: usize) -> f64 {
    let sig = wavelet();
    let r = 0.6;
    let dur = sig.t0 + r + 6.0 * sig.sigma;
    let raster = Raster::square(1.0, n, |_, _| 1.0);
    let cfg = FdtdConfig { cell: raster.cell, duration: dur, courant_fraction: 1.0, ..Default::default() };
    let res = fdtd_solve(&raster, (0.0, 0.0), 1.0, &sig, &[(r, 0.0)], &cfg).unwrap();
    let probe = AnalyticProbe { r, speed: 1.0, amplitude: 1.0, signature: sig };
    let an = analytic_homogeneous(&probe, 0.01, (dur / 0.01) as usize).unwrap();
    compare_traces(&res.waveform, &an).unwrap()
}

/// Observed order `log2(e(n) / e(2n))`.
pub fn fdtd_order(n: usize) -> (f64, f64, f64) {
    let (a, b) = (fdtd_vs_analytic(n), fdtd_vs_analytic(2 * n));
    (a, b, (a / b).log2())
}
