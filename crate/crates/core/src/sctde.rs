//! Stability-corrected time-domain exponent and its evaluation on the
//! Lanczos projection.
//!
//! For the impulse response the Lanczos approximation at probe `p` is
//!
//! ```text
//! u_p(t) = zeta_1 eta(t) Re[ (W_m f(t, T_m) e_1)_p ],   f(t, a) = exp(-sqrt(a) t) / sqrt(a)
//! ```
//!
//! evaluated mode by mode from the eigenpairs of the symmetrized `T_m`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::dense::{on_cut, principal_sqrt, solve, sqrtm};
use crate::error::{Error, Result};
use crate::lanczos::LanczosDecomposition;
use crate::signal::Waveform;
use crate::tridiag::{eigen_symmetric, identity_rows, Tridiagonal};
use crate::C64;

/// Size up to which the full eigenvector matrix is formed and checked.
pub const FULL_EIGENVECTOR_LIMIT: usize = 400;

/// `eta(t) exp(-sqrt(a) t) / sqrt(a)`, principal root.
pub fn sctde_scalar(t: f64, a: C64) -> Result<C64> {
    let r = principal_sqrt(a)?;
    if t < 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok((-r * t).exp() / r)
}

/// The naive propagator `-sin(sqrt(-a) t) / sqrt(-a)`, which agrees with the
/// real part of the corrected one on the negative axis but grows for
/// complex `a`.
pub fn uncorrected_scalar(t: f64, a: C64) -> C64 {
    if t < 0.0 {
        return C64::new(0.0, 0.0);
    }
    let k = (-a).sqrt();
    if k.norm() == 0.0 {
        return C64::new(-t, 0.0);
    }
    -(k * t).sin() / k
}

/// Root used for eigenvalues; on the cut the `+i0` limit is taken.
fn mode_root(theta: C64) -> Result<C64> {
    if on_cut(theta) {
        if theta.re == 0.0 {
            return Err(Error::BranchCut { re: theta.re, im: theta.im });
        }
        return Ok(C64::new(0.0, (-theta.re).sqrt()));
    }
    Ok(theta.sqrt())
}

/// Full eigendecomposition `T = G^{-1} S Theta S^T G` with `S^T S = I`.
#[derive(Debug, Clone)]
pub struct TridiagSpectrum {
    pub theta: Vec<C64>,
    /// `s[i][j]`: component `i` of eigenvector `j`.
    pub s: Vec<Vec<C64>>,
    pub g: Vec<C64>,
}

impl TridiagSpectrum {
    /// `(s_j^T e_1)^2` in the symmetrized basis.
    pub fn first_weights(&self) -> Vec<C64> {
        self.s[0].iter().map(|z| z * z).collect()
    }
}

/// Eigendecomposition with near-defectiveness and reconstruction checks.
pub fn eigen_tridiag(t: &Tridiagonal) -> Result<TridiagSpectrum> {
    let m = t.dim();
    let (off, g) = t.symmetrize()?;
    let eig = eigen_symmetric(&t.diag, &off, identity_rows(m))?;
    for j in 0..m {
        let quasi: C64 = (0..m).map(|i| eig.rows[i][j] * eig.rows[i][j]).sum();
        let norm2: f64 = (0..m).map(|i| eig.rows[i][j].norm_sqr()).sum();
        if quasi.norm() < 1e-12 * norm2 {
            return Err(Error::NearDefective { index: j, ratio: quasi.norm() / norm2 });
        }
    }
    // T e_1 from the modes: G^{-1} S Theta S^T e_1
    let scale = t.diag.iter().chain(&t.sub).chain(&t.sup).map(|z| z.norm()).fold(0.0, f64::max);
    let mut resid = 0.0f64;
    #[allow(clippy::needless_range_loop)]
    for i in 0..m.min(3) {
        let got: C64 = (0..m).map(|j| eig.rows[i][j] * eig.theta[j] * eig.rows[0][j]).sum::<C64>() / g[i];
        let want = match i {
            0 => t.diag[0],
            1 => t.sub[0],
            _ => C64::new(0.0, 0.0),
        };
        resid = resid.max((got - want).norm());
    }
    if resid > 1e-8 * scale {
        return Err(Error::Conditioning { residual: resid / scale });
    }
    Ok(TridiagSpectrum { theta: eig.theta, s: eig.rows, g })
}

/// Which propagator to apply to each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagator {
    Corrected,
    Uncorrected,
}

/// Mode data for fast trace evaluation at the probes.
#[derive(Debug, Clone)]
pub struct SctdeEvaluator {
    pub theta: Vec<C64>,
    /// `weights[p][j] = (W G^{-1} s_j)_p (s_j^T e_1)`.
    pub weights: Vec<Vec<C64>>,
    pub zeta1: f64,
    /// Modes on the negative real axis, evaluated in the `+i0` limit.
    pub cut_modes: usize,
}

impl SctdeEvaluator {
    /// Builds the evaluator from the leading `m` steps of a decomposition.
    ///
    /// Up to [`FULL_EIGENVECTOR_LIMIT`] the full eigenvector matrix is
    /// formed and checked; above it only the needed row combinations are
    /// tracked and the first two rows of `T e_1` are verified.
    pub fn new(dec: &LanczosDecomposition, m: usize) -> Result<Self> {
        let t = dec.tridiagonal(m)?;
        let (theta, first, probe_rows) = if m <= FULL_EIGENVECTOR_LIMIT {
            let spec = eigen_tridiag(&t)?;
            let rows: Vec<Vec<C64>> = dec
                .probe_rows
                .iter()
                .map(|w| (0..m).map(|j| (0..m).map(|i| w[i] / spec.g[i] * spec.s[i][j]).sum()).collect())
                .collect();
            (spec.theta, spec.s[0].clone(), rows)
        } else {
            let (off, g) = t.symmetrize()?;
            let mut start = identity_rows(2).into_iter().map(|mut r| {
                r.resize(m, C64::new(0.0, 0.0));
                r
            });
            let mut rows = vec![start.next().unwrap(), start.next().unwrap()];
            rows.extend(dec.probe_rows.iter().map(|w| (0..m).map(|i| w[i] / g[i]).collect()));
            let eig = eigen_symmetric(&t.diag, &off, rows)?;
            let scale = t.diag.iter().chain(&t.sub).chain(&t.sup).map(|z| z.norm()).fold(0.0, f64::max);
            let e0: C64 = (0..m).map(|j| eig.rows[0][j] * eig.theta[j] * eig.rows[0][j]).sum();
            let e1: C64 = (0..m).map(|j| eig.rows[1][j] * eig.theta[j] * eig.rows[0][j]).sum::<C64>() / g[1];
            let resid = (e0 - t.diag[0]).norm().max((e1 - t.sub[0]).norm());
            if resid > 1e-8 * scale {
                return Err(Error::Conditioning { residual: resid / scale });
            }
            let mut it = eig.rows.into_iter();
            let first = it.next().unwrap();
            let _ = it.next();
            (eig.theta, first, it.collect())
        };
        let weights = probe_rows.iter().map(|r| r.iter().zip(&first).map(|(a, b)| a * b).collect()).collect();
        let cut_modes = theta.iter().filter(|z| on_cut(**z)).count();
        Ok(Self { theta, weights, zeta1: dec.zeta1().re, cut_modes })
    }

    pub fn probes(&self) -> usize {
        self.weights.len()
    }

    /// Largest `|sqrt(theta)|`, the highest frequency present in the impulse response.
    pub fn max_frequency(&self) -> f64 {
        self.theta.iter().map(|z| z.norm().sqrt()).fold(0.0, f64::max)
    }

    /// Trace values at arbitrary times.
    pub fn evaluate_at(&self, times: &[f64], prop: Propagator) -> Result<Vec<Vec<f64>>> {
        let roots = self.theta.iter().map(|&z| mode_root(z)).collect::<Result<Vec<_>>>()?;
        Ok(self
            .weights
            .iter()
            .map(|w| {
                times
                    .iter()
                    .map(|&t| {
                        if t < 0.0 {
                            return 0.0;
                        }
                        let acc: C64 = match prop {
                            Propagator::Corrected => roots.iter().zip(w).map(|(r, c)| (-r * t).exp() / r * c).sum(),
                            Propagator::Uncorrected => {
                                self.theta.iter().zip(w).map(|(&a, c)| uncorrected_scalar(t, a) * c).sum()
                            }
                        };
                        self.zeta1 * acc.re
                    })
                    .collect()
            })
            .collect())
    }

    /// Corrected impulse response on `t_j = j dt`, `j < n`, by per-mode
    /// geometric recurrences re-seeded every 256 steps.
    pub fn evaluate_uniform(&self, dt: f64, n: usize) -> Result<Waveform> {
        const RESEED: usize = 256;
        let roots = self.theta.iter().map(|&z| mode_root(z)).collect::<Result<Vec<_>>>()?;
        let mut out = vec![vec![0.0; n]; self.probes()];
        let steps: Vec<C64> = roots.iter().map(|r| (-r * dt).exp()).collect();
        for (j, (r, step)) in roots.iter().zip(&steps).enumerate() {
            let coeff: Vec<C64> = self.weights.iter().map(|w| w[j] / r).collect();
            let mut z = C64::new(1.0, 0.0);
            for k in 0..n {
                if k % RESEED == 0 {
                    z = (-r * (dt * k as f64)).exp();
                }
                for (o, c) in out.iter_mut().zip(&coeff) {
                    o[k] += (c * z).re;
                }
                z *= step;
            }
        }
        for o in out.iter_mut() {
            for v in o.iter_mut() {
                *v *= self.zeta1;
            }
        }
        Waveform::new(0.0, dt, out)
    }
}

/// Impulse traces at the probes of a decomposition, using all its steps.
pub fn evaluate_impulse(dec: &LanczosDecomposition, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    SctdeEvaluator::new(dec, dec.m())?.evaluate_at(times, Propagator::Corrected)
}

/// Impulse step fine enough for trapezoid convolution against a wavelet
/// reaching `omega_source`: `dt <= min(2 pi / (w_grid + w_source), pi / (4 w_source)) / 2`.
pub fn impulse_step(eval: &SctdeEvaluator, omega_source: f64) -> f64 {
    let a = 2.0 * PI / (eval.max_frequency() + omega_source);
    let b = PI / (4.0 * omega_source);
    0.5 * a.min(b)
}

/// Ratio of the largest uncorrected to the largest corrected sample on `times`;
/// infinite if the uncorrected trace overflows.
pub fn growth_ratio(eval: &SctdeEvaluator, times: &[f64]) -> Result<f64> {
    let sc = eval.evaluate_at(times, Propagator::Corrected)?;
    let unc = eval.evaluate_at(times, Propagator::Uncorrected)?;
    let max_abs = |v: &Vec<Vec<f64>>| {
        let mut m = 0.0f64;
        for x in v.iter().flatten() {
            if !x.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(x.abs());
        }
        m
    };
    Ok(max_abs(&unc) / max_abs(&sc))
}

/// Stability-corrected resolvent
/// `f(l, A) b = A^{-1/2} (sqrt(l) + sqrt(A))^{-1} b / 2 + conj(A^{-1/2}) (sqrt(l) + conj(sqrt(A)))^{-1} b / 2`.
///
/// For `l` on the negative axis `sqrt(l)` is taken in the `+i0` limit.
pub fn sc_resolvent_dense(a: &DMatrix<C64>, lambda: C64, b: &DVector<C64>) -> Result<DVector<C64>> {
    let n = a.nrows();
    if n > 500 {
        return Err(Error::InvalidParameter(format!("dense resolvent limited to n <= 500, got {n}")));
    }
    let root = sqrtm(a)?;
    let sl = if on_cut(lambda) { C64::new(0.0, (-lambda.re).sqrt()) } else { lambda.sqrt() };
    let eye = DMatrix::<C64>::identity(n, n);
    let x1 = solve(&(&root * (&eye * sl + &root)), b)?;
    let root_c = root.map(|z| z.conj());
    let x2 = solve(&(&root_c * (&eye * sl + &root_c)), b)?;
    Ok((x1 + x2) * C64::new(0.5, 0.0))
}
