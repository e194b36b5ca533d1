//! Optimal rational approximation of the half-space impedance `1/sqrt(s)`.
//!
//! The impedance is approximated on the spectral interval of interest by a
//! Stieltjes-type `[k-1/k]` rational function
//!
//! ```text
//! phi_k(x) = sum_i y_i / (x - theta_i),   theta_i < 0,  y_i > 0,
//! ```
//!
//! minimising `max |1 - sqrt(x) phi_k(x)|` over `x` in `[|s_max|, |s_min|]`.
//! The optimum is Zolotarev's, written down in closed form with Jacobi
//! elliptic functions. The approximation lives on the magnitude interval;
//! the imaginary finite-difference steps built from it by
//! [`crate::stieltjes`] carry it onto the negative `s` axis.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::elliptic::{ellip_k_from_complement, jacobi};
use crate::error::{Error, Result};
use crate::C64;

/// Interval `[s_min, s_max]` of the negative spectral axis the layer must absorb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralInterval {
    pub s_min: f64,
    pub s_max: f64,
    /// Condition number `s_min / s_max >= 1`.
    pub chi: f64,
}

impl SpectralInterval {
    pub fn new(s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_min.is_finite() && s_max.is_finite()) || s_max >= 0.0 || s_min > s_max {
            return Err(Error::InvalidParameter(format!(
                "spectral interval needs s_min <= s_max < 0, got [{s_min}, {s_max}]"
            )));
        }
        Ok(Self { s_min, s_max, chi: s_min / s_max })
    }

    /// Interval `[-1, -1/chi]`, the normalized form used by the error plots.
    pub fn normalized(chi: f64) -> Result<Self> {
        if !(chi >= 1.0 && chi.is_finite()) {
            return Err(Error::InvalidParameter(format!("chi must be >= 1, got {chi}")));
        }
        Self::new(-1.0, -1.0 / chi)
    }

    /// Magnitude bounds `(|s_max|, |s_min|)`, the interval the impedance is fitted on.
    pub fn magnitudes(&self) -> (f64, f64) {
        (-self.s_max, -self.s_min)
    }
}

/// Spectral interval for a source band `[omega_min, omega_max]` and a bound
/// `mu` on the cosine of the incidence angle.
pub fn compute_interval(omega_min: f64, omega_max: f64, mu: f64) -> Result<SpectralInterval> {
    if !(omega_min > 0.0) || !(mu > 0.0) || mu > 1.0 || !(omega_max >= omega_min) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < omega_min <= omega_max and mu in (0, 1], got ({omega_min}, {omega_max}, {mu})"
        )));
    }
    let s_min = -omega_max * omega_max;
    let s_max = -(omega_min * mu).powi(2);
    Ok(SpectralInterval { s_min, s_max, chi: (omega_max / (omega_min * mu)).powi(2) })
}

/// Partial-fraction form of the discrete impedance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalImpedance {
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
    /// Uniform relative error achieved on the fitting interval.
    pub max_error: f64,
}

impl RationalImpedance {
    pub fn k(&self) -> usize {
        self.poles.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.poles.iter().zip(&self.residues).map(|(&p, &y)| y / (x - p)).sum()
    }

    pub fn eval_complex(&self, s: C64) -> C64 {
        self.poles.iter().zip(&self.residues).map(|(&p, &y)| y / (s - p)).sum()
    }

    /// Signed relative error `1 - sqrt(x) phi(x)` at a point of the magnitude axis.
    pub fn signed_error(&self, x: f64) -> f64 {
        1.0 - x.sqrt() * self.eval(x)
    }

    /// Rescales for `x -> c x`: poles scale by `c`, residues by `sqrt(c)`.
    pub fn rescaled(&self, c: f64) -> Self {
        Self {
            poles: self.poles.iter().map(|p| p * c).collect(),
            residues: self.residues.iter().map(|y| y * c.sqrt()).collect(),
            max_error: self.max_error,
        }
    }
}

/// Knobs for [`zolotarev_approx_with`].
#[derive(Debug, Clone, Copy)]
pub struct ZolotarevOptions {
    /// Remez exchange sweeps applied after the closed form; 0 disables.
    pub remez_polish: usize,
    /// Coarse log-spaced samples per alternation point when locating extrema.
    pub samples_per_node: usize,
}

impl Default for ZolotarevOptions {
    fn default() -> Self {
        Self { remez_polish: 0, samples_per_node: 64 }
    }
}

/// Asymptotic size of the optimal error, `4 exp(-2 pi^2 k / ln(16 chi))`.
pub fn predicted_error(chi: f64, k: usize) -> f64 {
    4.0 * (-2.0 * std::f64::consts::PI.powi(2) * k as f64 / (16.0 * chi).ln()).exp()
}

/// Smallest optimal error we still trust in double precision.
const ERROR_FLOOR: f64 = 64.0 * f64::EPSILON;

fn max_resolvable_k(chi: f64) -> usize {
    let rate = 2.0 * std::f64::consts::PI.powi(2) / (16.0 * chi).ln();
    ((4.0 / ERROR_FLOOR).ln() / rate).floor() as usize
}

/// Zolotarev's optimal `[k-1/k]` relative approximation of `1/sqrt(x)`.
pub fn zolotarev_approx(interval: &SpectralInterval, k: usize) -> Result<RationalImpedance> {
    zolotarev_approx_with(interval, k, &ZolotarevOptions::default())
}

pub fn zolotarev_approx_with(
    interval: &SpectralInterval,
    k: usize,
    opts: &ZolotarevOptions,
) -> Result<RationalImpedance> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (lo, _hi) = interval.magnitudes();
    let chi = interval.chi;

    // Point interval: interpolate at the single point; the optimum is not unique for k > 1.
    if chi <= 1.0 + 1e-12 {
        if k > 1 {
            return Err(Error::InvalidParameter(format!(
                "point interval (chi = 1) has no unique optimum for k = {k} > 1"
            )));
        }
        let imp = RationalImpedance { poles: vec![-1.0], residues: vec![2.0], max_error: 0.0 };
        return Ok(imp.rescaled(lo));
    }

    if predicted_error(chi, k) < ERROR_FLOOR {
        return Err(Error::Precision { k, max_k: max_resolvable_k(chi) });
    }

    // Work on [1, chi]; the parameter of the complementary modulus is 1 - 1/chi.
    let m1 = 1.0 / chi;
    let kp = ellip_k_from_complement(m1);
    let big_k = kp; // K(1 - 1/chi)
    let c: Vec<f64> = (1..2 * k)
        .map(|l| {
            let u = l as f64 * big_k / (2 * k) as f64;
            if 2 * l <= 2 * k {
                let j = jacobi(u, 1.0 - m1);
                (j.sn / j.cn).powi(2)
            } else {
                // sn(K - v) = cn(v)/dn(v), cn(K - v) = k' sn(v)/dn(v)
                let j = jacobi(big_k - u, 1.0 - m1);
                (j.cn / j.sn).powi(2) / m1
            }
        })
        .collect();
    let poles: Vec<f64> = (0..k).map(|i| -c[2 * i]).collect();
    let zeros: Vec<f64> = (0..k - 1).map(|i| -c[2 * i + 1]).collect();

    let residues_unscaled: Vec<f64> = (0..k)
        .map(|i| {
            let p = poles[i];
            let num: f64 = zeros.iter().map(|z| p - z).product();
            let den: f64 = (0..k).filter(|&j| j != i).map(|j| p - poles[j]).product();
            num / den
        })
        .collect();
    for w in poles.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Precision { k, max_k: max_resolvable_k(chi) });
        }
    }

    let unscaled = RationalImpedance { poles, residues: residues_unscaled, max_error: f64::NAN };
    let g = |x: f64| x.sqrt() * unscaled.eval(x);
    let samples = opts.samples_per_node * (2 * k + 1);
    let (gmin, gmax) = extreme_values(&g, 1.0, chi, samples);
    let scale = 2.0 / (gmin + gmax);
    let mut imp = RationalImpedance {
        poles: unscaled.poles.clone(),
        residues: unscaled.residues.iter().map(|r| r * scale).collect(),
        max_error: (gmax - gmin) / (gmax + gmin),
    };

    if opts.remez_polish > 0 {
        remez_polish(&mut imp, 1.0, chi, opts.remez_polish, opts.samples_per_node);
    }
    Ok(imp.rescaled(lo))
}

/// Maximum of `|1 - sqrt(x) phi(x)|` over `samples` log-spaced points of the
/// magnitude interval.
pub fn max_relative_error<F: Fn(f64) -> f64>(phi: F, interval: &SpectralInterval, samples: usize) -> f64 {
    let (lo, hi) = interval.magnitudes();
    log_grid(lo, hi, samples).map(|x| (1.0 - x.sqrt() * phi(x)).abs()).fold(0.0, f64::max)
}

/// Sampled uniform relative error of an impedance on an interval.
pub fn impedance_error(imp: &RationalImpedance, interval: &SpectralInterval, samples: usize) -> Result<f64> {
    let needed = 2 * imp.k() + 1;
    if samples < needed {
        return Err(Error::InvalidParameter(format!("need at least 2k+1 = {needed} samples, got {samples}")));
    }
    Ok(max_relative_error(|x| imp.eval(x), interval, samples))
}

/// `(x, 1 - sqrt(x) phi(x))` pairs on a log grid, optionally widened by a
/// factor `pad` on both sides of the interval.
pub fn error_curve(imp: &RationalImpedance, interval: &SpectralInterval, samples: usize, pad: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = interval.magnitudes();
    log_grid(lo / pad, hi * pad, samples).map(|x| (x, imp.signed_error(x))).collect()
}

/// Alternating extrema `(x, e(x))` of the signed error on the fitting interval.
pub fn alternation_points(imp: &RationalImpedance, interval: &SpectralInterval, samples: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = interval.magnitudes();
    let e = |x: f64| imp.signed_error(x);
    local_extrema(&e, lo, hi, samples)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let n = n.max(2);
    (0..n).map(move |i| if i == n - 1 { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() })
}

/// Endpoints plus refined interior extrema of `f` on `[lo, hi]`.
fn local_extrema<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = log_grid(lo, hi, samples).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = vec![(xs[0], ys[0])];
    for i in 1..xs.len() - 1 {
        let is_max = ys[i] >= ys[i - 1] && ys[i] > ys[i + 1];
        let is_min = ys[i] <= ys[i - 1] && ys[i] < ys[i + 1];
        if is_max || is_min {
            let sign = if is_max { 1.0 } else { -1.0 };
            let x = golden_max(|x| sign * f(x), xs[i - 1], xs[i + 1]);
            out.push((x, f(x)));
        }
    }
    let n = xs.len() - 1;
    out.push((xs[n], ys[n]));
    out
}

fn extreme_values<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    local_extrema(f, lo, hi, samples)
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), &(_, y)| (mn.min(y), mx.max(y)))
}

/// Golden-section search for a maximum in log coordinates.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    for _ in 0..80 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp());
        }
    }
    (0.5 * (a + b)).exp()
}

/// Newton-based Remez exchange on `(theta, y, E)` with the reference set taken
/// from the current alternation points. Leaves `imp` untouched when the
/// reference set does not have exactly `2k+1` points or a step fails.
fn remez_polish(imp: &mut RationalImpedance, lo: f64, hi: f64, sweeps: usize, samples_per_node: usize) {
    let k = imp.k();
    let n = 2 * k + 1;
    for _ in 0..sweeps {
        let e = |x: f64| imp.signed_error(x);
        let refs = local_extrema(&e, lo, hi, samples_per_node * n);
        if refs.len() != n {
            return;
        }
        let sign0 = refs[0].1.signum();
        let mut theta = imp.poles.clone();
        let mut y = imp.residues.clone();
        let mut level = refs[0].1.abs();
        let mut ok = false;
        for _ in 0..20 {
            let mut jac = DMatrix::<f64>::zeros(n, n);
            let mut rhs = DVector::<f64>::zeros(n);
            for (j, &(x, _)) in refs.iter().enumerate() {
                let sx = x.sqrt();
                let alt = sign0 * if j % 2 == 0 { 1.0 } else { -1.0 };
                let phi: f64 = theta.iter().zip(&y).map(|(&t, &r)| r / (x - t)).sum();
                rhs[j] = -(1.0 - sx * phi - alt * level);
                for i in 0..k {
                    let d = x - theta[i];
                    jac[(j, i)] = -sx * y[i] / (d * d);
                    jac[(j, k + i)] = -sx / d;
                }
                jac[(j, 2 * k)] = -alt;
            }
            let Some(step) = jac.lu().solve(&rhs) else { return };
            for i in 0..k {
                theta[i] += step[i];
                y[i] += step[k + i];
            }
            level += step[2 * k];
            if step.amax() < 1e-15 * (1.0 + theta.iter().fold(0.0f64, |a, t| a.max(t.abs()))) {
                ok = true;
                break;
            }
        }
        if !ok || theta.iter().any(|&t| t >= 0.0) || y.iter().any(|&r| r <= 0.0) {
            return;
        }
        let candidate = RationalImpedance { poles: theta, residues: y, max_error: level.abs() };
        let err = extreme_abs(&candidate, lo, hi, samples_per_node * n);
        if err <= imp.max_error {
            *imp = RationalImpedance { max_error: err, ..candidate };
        } else {
            return;
        }
    }
}

fn extreme_abs(imp: &RationalImpedance, lo: f64, hi: f64, samples: usize) -> f64 {
    let e = |x: f64| imp.signed_error(x);
    local_extrema(&e, lo, hi, samples).iter().map(|p| p.1.abs()).fold(0.0, f64::max)
}
