//! Stieltjes continued fractions and the finite-difference steps they encode.
//!
//! A staggered three-point scheme with primary steps `h_l` and dual steps
//! `hh_l` has the Neumann-to-Dirichlet impedance
//!
//! ```text
//! phi_k(s) = 1 / (hh_1 s + 1 / (h_1 + 1 / (hh_2 s + ... + 1 / (hh_k s + 1 / h_k))))
//! ```
//!
//! For a Zolotarev impedance all `h_l`, `hh_l` come out real and positive.
//! The layer itself uses them multiplied by `i`, which maps the fit on the
//! positive magnitude axis onto the negative `s` axis.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::zolotarev::RationalImpedance;
use crate::C64;

/// Magnitudes of the imaginary layer steps, `h_l = i gamma_l`, `hh_l = i gamma_hat_l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmlSteps {
    pub gamma: Vec<f64>,
    pub gamma_hat: Vec<f64>,
}

impl PmlSteps {
    /// No absorbing layer; grids built from this close with Dirichlet at `+-1`.
    pub fn none() -> Self {
        Self { gamma: Vec::new(), gamma_hat: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.gamma.len()
    }

    pub fn primary(&self) -> Vec<C64> {
        self.gamma.iter().map(|&g| C64::new(0.0, g)).collect()
    }

    pub fn dual(&self) -> Vec<C64> {
        self.gamma_hat.iter().map(|&g| C64::new(0.0, g)).collect()
    }

    /// Total imaginary depth of the layer, `sum gamma_l`.
    pub fn depth(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// Converts a partial-fraction impedance into continued-fraction steps.
///
/// Runs a symmetric Lanczos process on `diag(theta)` from the start vector
/// `sqrt(y) / |sqrt(y)|`; the resulting Jacobi matrix is the symmetrized
/// three-point operator, from which the steps are peeled off one level at a
/// time.
pub fn to_continued_fraction(imp: &RationalImpedance) -> Result<PmlSteps> {
    let k = imp.k();
    if k == 0 || imp.residues.len() != k {
        return Err(Error::DegenerateInput("impedance needs k >= 1 poles with matching residues".into()));
    }
    if imp.residues.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::DegenerateInput("residues must be strictly positive".into()));
    }
    for i in 0..k {
        for j in 0..i {
            if (imp.poles[i] - imp.poles[j]).abs() <= 1e-14 * imp.poles[i].abs().max(imp.poles[j].abs()) {
                return Err(Error::DegenerateInput(format!("coincident poles at {}", imp.poles[i])));
            }
        }
    }

    let total: f64 = imp.residues.iter().sum();
    let (alpha, beta) = lanczos_jacobi(&imp.poles, &imp.residues)?;

    let mut gamma = Vec::with_capacity(k);
    let mut gamma_hat = Vec::with_capacity(k);
    let mut hh = 1.0 / total;
    let mut inv_h_prev = 0.0;
    for l in 0..k {
        gamma_hat.push(hh);
        let inv_h = -alpha[l] * hh - inv_h_prev;
        if !(inv_h > 0.0) {
            return Err(Error::DegenerateInput(format!("non-positive step at level {}", l + 1)));
        }
        let h = 1.0 / inv_h;
        gamma.push(h);
        if l + 1 < k {
            hh = 1.0 / (h * h * hh * beta[l] * beta[l]);
        }
        inv_h_prev = inv_h;
    }
    Ok(PmlSteps { gamma, gamma_hat })
}

/// Lanczos tridiagonalization of `diag(theta)` with full reorthogonalization.
fn lanczos_jacobi(theta: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = theta.len();
    let norm: f64 = y.iter().sum::<f64>().sqrt();
    let mut q: Vec<DVector<f64>> = vec![DVector::from_iterator(k, y.iter().map(|v| v.sqrt() / norm))];
    let mut alpha = Vec::with_capacity(k);
    let mut beta = Vec::with_capacity(k.saturating_sub(1));
    let scale = theta.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    for j in 0..k {
        let qj = &q[j];
        let mut w = DVector::from_iterator(k, (0..k).map(|i| theta[i] * qj[i]));
        let a = qj.dot(&w);
        alpha.push(a);
        if j + 1 == k {
            break;
        }
        w -= qj * a;
        if j > 0 {
            w -= &q[j - 1] * beta[j - 1];
        }
        for _ in 0..2 {
            for qi in &q {
                let c = qi.dot(&w);
                w -= qi * c;
            }
        }
        let b = w.norm();
        if b <= 1e-13 * scale {
            return Err(Error::DegenerateInput(format!("Lanczos breakdown at step {} (coincident poles)", j + 1)));
        }
        beta.push(b);
        q.push(w / b);
    }
    Ok((alpha, beta))
}

/// Evaluates the continued fraction with real steps `gamma`, `gamma_hat`
/// from the bottom up.
pub fn eval_impedance_cf(steps: &PmlSteps, s: C64) -> Result<C64> {
    let k = steps.k();
    if k == 0 {
        return Err(Error::InvalidParameter("empty continued fraction".into()));
    }
    let tiny = 1e-300;
    let mut t = s * steps.gamma_hat[k - 1] + 1.0 / steps.gamma[k - 1];
    for l in (0..k - 1).rev() {
        if t.norm() < tiny {
            return Err(Error::PoleProximity { level: l + 2 });
        }
        let inner = steps.gamma[l] + 1.0 / t;
        if inner.norm() < tiny {
            return Err(Error::PoleProximity { level: l + 1 });
        }
        t = s * steps.gamma_hat[l] + 1.0 / inner;
    }
    if t.norm() < tiny {
        return Err(Error::PoleProximity { level: 1 });
    }
    Ok(1.0 / t)
}

/// The three-point operator `L_h` on the layer unknowns `w_1..w_k` (real steps),
/// with Neumann data at the first node and `w_{k+1} = 0`.
pub fn step_operator(steps: &PmlSteps) -> DMatrix<f64> {
    let k = steps.k();
    let (h, hh) = (&steps.gamma, &steps.gamma_hat);
    let mut l = DMatrix::zeros(k, k);
    for i in 0..k {
        let left = if i == 0 { 0.0 } else { 1.0 / h[i - 1] };
        l[(i, i)] = -(1.0 / h[i] + left) / hh[i];
        if i + 1 < k {
            l[(i, i + 1)] = 1.0 / (hh[i] * h[i]);
            l[(i + 1, i)] = 1.0 / (hh[i + 1] * h[i]);
        }
    }
    l
}

/// Inverse of [`to_continued_fraction`]: the poles are the eigenvalues of
/// the step operator and the residues `q_j[0]^2 / gamma_hat_1`, with `q_j`
/// the orthonormal eigenvectors of its symmetrized form. `max_error` is
/// unknown here and left as NaN.
pub fn to_partial_fractions(steps: &PmlSteps) -> Result<RationalImpedance> {
    let k = steps.k();
    if k == 0 || steps.gamma_hat.len() != k {
        return Err(Error::InvalidParameter("need k >= 1 matching primary and dual steps".into()));
    }
    if steps.gamma.iter().chain(&steps.gamma_hat).any(|&g| !(g > 0.0)) {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let l = step_operator(steps);
    let root: Vec<f64> = steps.gamma_hat.iter().map(|g| g.sqrt()).collect();
    let sym = DMatrix::from_fn(k, k, |i, j| root[i] * l[(i, j)] / root[j]);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut pairs: Vec<(f64, f64)> =
        (0..k).map(|j| (eig.eigenvalues[j], eig.eigenvectors[(0, j)].powi(2) / steps.gamma_hat[0])).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(RationalImpedance {
        poles: pairs.iter().map(|p| p.0).collect(),
        residues: pairs.iter().map(|p| p.1).collect(),
        max_error: f64::NAN,
    })
}
