//! Free-space response of `u_tt - v^2 lap u = -a q(t) delta(x)` in 2D.
//!
//! In the frequency domain (`e^{i w t}` transform) the response is
//! `-a Q(w) (i / 4 v^2) H0^(1)(w r / v)`; in the time domain
//!
//! ```text
//! u(t) = -a / (2 pi v^2) int_0^inf q(t - (r / v) cosh s) ds.
//! ```

use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::bessel::hankel1_0;
use crate::error::{Error, Result};
use crate::signal::{SourceSignature, Waveform};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct AnalyticProbe {
    /// Source-receiver distance.
    pub r: f64,
    /// Wave speed.
    pub speed: f64,
    pub amplitude: f64,
    pub signature: SourceSignature,
}

impl AnalyticProbe {
    fn check(&self) -> Result<()> {
        if !(self.r > 0.0) || !(self.speed > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need r > 0 and speed > 0, got r = {}, speed = {}",
                self.r, self.speed
            )));
        }
        Ok(())
    }
}

/// Trace on `t_j = j dt`, `j < n`, by trapezoid quadrature of the inverse
/// Fourier integral evaluated with one FFT. The frequency step is chosen so
/// the implied period is at least 32 times the record.
pub fn analytic_homogeneous(probe: &AnalyticProbe, dt: f64, n: usize) -> Result<Waveform> {
    probe.check()?;
    let q = &probe.signature;
    let w_cut = q.omega_cutoff();
    if dt * w_cut > PI {
        return Err(Error::Sampling(format!("output step {dt} under-resolves the source spectrum up to {w_cut}")));
    }
    let len = (32 * n.max(16)).next_power_of_two();
    let dw = 2.0 * PI / (len as f64 * dt);
    let kmax = ((w_cut / dw).ceil() as usize).min(len / 2);
    let scale = -probe.amplitude / (4.0 * probe.speed * probe.speed);
    let mut buf = vec![C64::new(0.0, 0.0); len];
    for (k, slot) in buf.iter_mut().enumerate().take(kmax + 1).skip(1) {
        let w = k as f64 * dw;
        let kernel = C64::new(0.0, scale) * hankel1_0(w * probe.r / probe.speed);
        *slot = q.spectrum(w) * kernel;
    }
    // u(t) = (1/pi) Re sum_k U_k e^{-i w_k t} dw
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let samples = buf.iter().take(n).map(|z| z.re * dw / PI).collect();
    Waveform::new(0.0, dt, vec![samples])
}

/// The same trace by direct quadrature of the time-domain integral over the
/// part of `s` where the wavelet is non-negligible.
pub fn analytic_time_quadrature(probe: &AnalyticProbe, times: &[f64]) -> Result<Vec<f64>> {
    probe.check()?;
    let q = &probe.signature;
    let lag = probe.r / probe.speed;
    let pref = -probe.amplitude / (2.0 * PI * probe.speed * probe.speed);
    let width = 12.0 * q.sigma;
    Ok(times
        .iter()
        .map(|&t| {
            // q(t - lag cosh s) matters for t - lag cosh s in [t0 - width, t0 + width]
            let hi = (t - q.t0 + width) / lag;
            if hi <= 1.0 {
                return 0.0;
            }
            let lo = ((t - q.t0 - width) / lag).max(1.0);
            let (s_lo, s_hi) = (lo.acosh(), hi.acosh());
            pref * gauss_legendre(|s| q.value(t - lag * s.cosh()), s_lo, s_hi, 800)
        })
        .collect())
}

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] =
        [0.0, -0.538_469_310_105_683, 0.538_469_310_105_683, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for (x, w) in X.iter().zip(W) {
            acc += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * acc
}
