//! Source wavelets, sampled traces, convolution and trace comparison.

use std::f64::consts::{LN_10, PI};
use std::io::{BufRead, Write};

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Modulated Gaussian `q(t) = sin(w_c (t - t0)) exp(-(t - t0)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSignature {
    pub omega_c: f64,
    pub sigma: f64,
    pub t0: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub floor_db: f64,
}

impl SourceSignature {
    pub fn value(&self, t: f64) -> f64 {
        let tau = t - self.t0;
        (self.omega_c * tau).sin() * (-0.5 * tau * tau / (self.sigma * self.sigma)).exp()
    }

    /// `int_{-inf}^t q`, by four-point Gauss-Legendre on panels of width `sigma/8`.
    pub fn integral(&self, t: f64) -> f64 {
        let lo = self.t0 - 12.0 * self.sigma;
        if t <= lo {
            return 0.0;
        }
        let panels = ((t - lo) / (self.sigma / 8.0)).ceil().max(1.0) as usize;
        let w = (t - lo) / panels as f64;
        (0..panels).map(|p| gauss4(|s| self.value(s), lo + w * p as f64, w)).sum()
    }

    /// Magnitude of `Q(w) = int q(t) e^{i w t} dt`.
    pub fn spectrum_abs(&self, omega: f64) -> f64 {
        let g = |x: f64| self.sigma * (2.0 * PI).sqrt() * (-0.5 * (self.sigma * x).powi(2)).exp();
        0.5 * (g(omega - self.omega_c) - g(omega + self.omega_c)).abs()
    }

    /// Complex spectrum `Q(w)`.
    pub fn spectrum(&self, omega: f64) -> C64 {
        let g = |x: f64| self.sigma * (2.0 * PI).sqrt() * (-0.5 * (self.sigma * x).powi(2)).exp();
        let phase = C64::from_polar(1.0, omega * self.t0);
        phase * (g(omega + self.omega_c) - g(omega - self.omega_c)) / C64::new(0.0, 2.0)
    }

    /// Frequency above which `|Q|` is below `1e-16` of its peak.
    pub fn omega_cutoff(&self) -> f64 {
        self.omega_c + (2.0 * 16.0 * LN_10).sqrt() / self.sigma
    }

    /// Same pulse in a time unit `scale` times larger (`t' = t / scale`).
    pub fn rescaled_time(&self, scale: f64) -> Self {
        Self {
            omega_c: self.omega_c * scale,
            sigma: self.sigma / scale,
            t0: self.t0 / scale,
            omega_min: self.omega_min * scale,
            omega_max: self.omega_max * scale,
            floor_db: self.floor_db,
        }
    }
}

fn gauss4(f: impl Fn(f64) -> f64, a: f64, w: f64) -> f64 {
    const X: [f64; 4] =
        [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
    const W: [f64; 4] =
        [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
    let mid = a + 0.5 * w;
    0.5 * w * X.iter().zip(W).map(|(x, wt)| wt * f(mid + 0.5 * w * x)).sum::<f64>()
}

/// Wavelet centred on the band with `|Q(w_min)| / |Q(w_c)| = 10^(floor_db / 20)`.
///
/// The Gaussian envelope alone gives `sigma = sqrt(-2 ln r) / dw`; the mirror
/// lobe at `-w_c` shifts the edge value slightly, so `sigma` is refined by
/// bisection on the exact spectrum. The delay is `6 sigma`.
pub fn make_wavelet(omega_min: f64, omega_max: f64, floor_db: f64) -> Result<SourceSignature> {
    if !(omega_min > 0.0 && omega_max > omega_min) {
        return Err(Error::InvalidParameter(format!("need 0 < omega_min < omega_max, got {omega_min}, {omega_max}")));
    }
    if !(floor_db < 0.0 && floor_db > -300.0) {
        return Err(Error::InvalidParameter(format!("spectral floor {floor_db} dB is not achievable")));
    }
    let omega_c = 0.5 * (omega_min + omega_max);
    let half = 0.5 * (omega_max - omega_min);
    let target = 10f64.powf(floor_db / 20.0);
    let envelope = (-2.0 * target.ln()).sqrt() / half;
    let ratio = |sigma: f64| {
        let s = SourceSignature { omega_c, sigma, t0: 0.0, omega_min, omega_max, floor_db };
        s.spectrum_abs(omega_min) / s.spectrum_abs(omega_c)
    };
    let (mut lo, mut hi) = (0.5 * envelope, 2.0 * envelope);
    if !(ratio(lo) > target && ratio(hi) < target) {
        return Err(Error::InvalidParameter(format!("band too wide for a {floor_db} dB edge")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let sigma = 0.5 * (lo + hi);
    Ok(SourceSignature { omega_c, sigma, t0: 6.0 * sigma, omega_min, omega_max, floor_db })
}

/// Uniformly sampled real traces, one per probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<Vec<f64>>,
}

impl Waveform {
    pub fn new(t0: f64, dt: f64, samples: Vec<Vec<f64>>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
        }
        if let Some(first) = samples.first() {
            if samples.iter().any(|s| s.len() != first.len()) {
                return Err(Error::InvalidParameter("probe traces differ in length".into()));
            }
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn probes(&self) -> usize {
        self.samples.len()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + self.dt * j as f64
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.time(j)).collect()
    }

    /// Same data on a time axis multiplied by `scale`.
    pub fn rescaled_time(&self, scale: f64) -> Self {
        Self { t0: self.t0 * scale, dt: self.dt * scale, samples: self.samples.clone() }
    }

    /// First `n` samples.
    pub fn truncated(&self, n: usize) -> Self {
        Self { t0: self.t0, dt: self.dt, samples: self.samples.iter().map(|s| s[..n.min(s.len())].to_vec()).collect() }
    }

    /// CSV with header `t,probe1,...` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (1..=self.probes()).map(|p| format!("probe{p}")).collect();
        writeln!(out, "t,{}", header.join(","))?;
        for j in 0..self.len() {
            write!(out, "{:.16e}", self.time(j))?;
            for s in &self.samples {
                write!(out, ",{:.16e}", s[j])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Config("empty trace file".into()))??;
        let cols = header.split(',').count();
        if cols < 2 || !header.starts_with('t') {
            return Err(Error::Config(format!("bad trace header '{header}'")));
        }
        let mut times = Vec::new();
        let mut samples = vec![Vec::new(); cols - 1];
        for (no, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("line {}: {e}", no + 2)))?;
            if vals.len() != cols {
                return Err(Error::Config(format!("line {}: expected {cols} columns", no + 2)));
            }
            times.push(vals[0]);
            for (s, v) in samples.iter_mut().zip(&vals[1..]) {
                s.push(*v);
            }
        }
        if times.len() < 2 {
            return Err(Error::Config("trace needs at least two samples".into()));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
                return Err(Error::Config("trace is not uniformly sampled".into()));
            }
        }
        Waveform::new(times[0], dt, samples)
    }
}

/// Linear convolution of two real sequences by FFT.
pub fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = (a.len() + b.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let pad = |x: &[f64]| {
        let mut v: Vec<C64> = x.iter().map(|&r| C64::new(r, 0.0)).collect();
        v.resize(n, C64::new(0.0, 0.0));
        v
    };
    let (mut fa, mut fb) = (pad(a), pad(b));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa.iter().take(a.len() + b.len() - 1).map(|z| z.re / n as f64).collect()
}

/// Causal trapezoid convolution `y_j = dt sum_{k<=j} w_k u_k q_{j-k}` of an
/// impulse response starting at `t = 0` with kernel samples `q_l = q(l dt)`.
pub fn convolve_samples(impulse: &Waveform, q: &[f64]) -> Result<Waveform> {
    if impulse.t0 != 0.0 {
        return Err(Error::InvalidParameter("impulse response must start at t = 0".into()));
    }
    let n = impulse.len();
    let q = &q[..n.min(q.len())];
    let samples = impulse
        .samples
        .iter()
        .map(|u| {
            let mut weighted = u.clone();
            if let Some(first) = weighted.first_mut() {
                *first *= 0.5;
            }
            let mut y = fft_convolve(&weighted, q);
            y.truncate(n);
            y.resize(n, 0.0);
            y.iter().map(|v| v * impulse.dt).collect()
        })
        .collect();
    Waveform::new(0.0, impulse.dt, samples)
}

/// Convolves an impulse response with the wavelet, after checking the
/// sampling guard `dt <= pi / (4 w_max)`.
pub fn convolve_source(impulse: &Waveform, q: &SourceSignature) -> Result<Waveform> {
    let limit = PI / (4.0 * q.omega_max);
    if impulse.dt > limit {
        return Err(Error::Sampling(format!("impulse step {} exceeds pi/(4 w_max) = {limit}", impulse.dt)));
    }
    let kernel: Vec<f64> = (0..impulse.len()).map(|j| q.value(j as f64 * impulse.dt)).collect();
    convolve_samples(impulse, &kernel)
}

const SINC_HALF_WIDTH: isize = 32;
const KAISER_BETA: f64 = 14.0;

/// Modified Bessel function `I0` by its power series.
fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Band-limited value of a uniformly sampled signal at `t`, by a
/// Kaiser-windowed sinc over `2 * 32` neighbours. Zero outside the record.
pub fn interpolate(samples: &[f64], t0: f64, dt: f64, t: f64) -> f64 {
    let x = (t - t0) / dt;
    let centre = x.floor() as isize;
    let n = samples.len() as isize;
    let mut acc = 0.0;
    for j in centre - SINC_HALF_WIDTH + 1..=centre + SINC_HALF_WIDTH {
        if j < 0 || j >= n {
            continue;
        }
        let d = x - j as f64;
        let sinc = if d.abs() < 1e-12 { 1.0 } else { (PI * d).sin() / (PI * d) };
        let u = d / SINC_HALF_WIDTH as f64;
        let window = bessel_i0(KAISER_BETA * (1.0 - u * u).max(0.0).sqrt()) / bessel_i0(KAISER_BETA);
        acc += samples[j as usize] * sinc * window;
    }
    acc
}

/// Resamples every probe onto `n` points starting at `t0` with step `dt`.
pub fn resample(w: &Waveform, t0: f64, dt: f64, n: usize) -> Result<Waveform> {
    let samples =
        w.samples.iter().map(|s| (0..n).map(|j| interpolate(s, w.t0, w.dt, t0 + dt * j as f64)).collect()).collect();
    Waveform::new(t0, dt, samples)
}

/// Relative L2 error `|a - b| / |b|` per probe, with `a` resampled onto the
/// part of `b`'s grid that both records cover.
pub fn compare_probes(a: &Waveform, b: &Waveform) -> Result<Vec<f64>> {
    if a.probes() != b.probes() {
        return Err(Error::DimensionMismatch { expected: b.probes(), got: a.probes() });
    }
    let eps = 1e-9 * b.dt;
    let idx: Vec<usize> = (0..b.len()).filter(|&j| b.time(j) >= a.t0 - eps && b.time(j) <= a.t_end() + eps).collect();
    if idx.is_empty() {
        return Err(Error::Sampling("trace windows do not overlap".into()));
    }
    Ok(a.samples
        .iter()
        .zip(&b.samples)
        .map(|(sa, sb)| {
            let (mut num, mut den) = (0.0, 0.0);
            for &j in &idx {
                let va = interpolate(sa, a.t0, a.dt, b.time(j));
                num += (va - sb[j]).powi(2);
                den += sb[j] * sb[j];
            }
            if den == 0.0 {
                if num == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (num / den).sqrt()
            }
        })
        .collect())
}

/// Relative L2 error over all probes together.
pub fn compare_traces(a: &Waveform, b: &Waveform) -> Result<f64> {
    let per = compare_probes(a, b)?;
    let weights: Vec<f64> = b.samples.iter().map(|s| s.iter().map(|v| v * v).sum::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Ok(per.iter().cloned().fold(0.0, f64::max));
    }
    Ok((per.iter().zip(&weights).map(|(e, w)| e * e * w).sum::<f64>() / total).sqrt())
}

/// `(int w^2 dt, (2/pi) int_0^inf (Re F w)^2 dw)` for a causal signal
/// sampled from `t = 0`, with `F w(w) = int w(t) e^{i w t} dt` by a zero-padded
/// trapezoid FFT.
pub fn plancherel_energies(w: &[f64], dt: f64) -> (f64, f64) {
    let n = w.len();
    let time: f64 = dt * (w.iter().map(|v| v * v).sum::<f64>() - 0.5 * (w[0] * w[0] + w[n - 1] * w[n - 1]));
    let len = (8 * n).next_power_of_two();
    let mut buf: Vec<C64> = w.iter().map(|&v| C64::new(v, 0.0)).collect();
    buf[0] *= 0.5;
    buf[n - 1] *= 0.5;
    buf.resize(len, C64::new(0.0, 0.0));
    // forward transform with e^{+i w t}
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let dw = 2.0 * PI / (len as f64 * dt);
    let half = len / 2;
    let mut freq = 0.0;
    for (k, z) in buf.iter().take(half + 1).enumerate() {
        let re = z.re * dt;
        let weight = if k == 0 || k == half { 0.5 } else { 1.0 };
        freq += weight * re * re;
    }
    (time, 2.0 / PI * freq * dw)
}
