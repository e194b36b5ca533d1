//! Eigenvalues of complex symmetric tridiagonal matrices.
//!
//! Implicit QL with complex orthogonal rotations (`c^2 + s^2 = 1`, no
//! conjugation), so the computed eigenvector matrix `S` satisfies
//! `S^T S = I`. Instead of forming `S`, callers may track any set of row
//! vectors `v` and get `v S` back; tracking `r` rows costs `O(r m^2)`.

use crate::error::{Error, Result};
use crate::C64;

const MAX_SWEEPS: usize = 60;

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<C64>,
    /// `T[i+1, i]`.
    pub sub: Vec<C64>,
    /// `T[i, i+1]`.
    pub sup: Vec<C64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let n = self.dim();
        let mut t = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = self.diag[i];
            if i + 1 < n {
                t[(i + 1, i)] = self.sub[i];
                t[(i, i + 1)] = self.sup[i];
            }
        }
        t
    }

    /// Diagonal similarity `H = G T G^{-1}` making `T` symmetric.
    ///
    /// Returns the off-diagonal of `H` and `g` with `g_1 = 1`.
    pub fn symmetrize(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let n = self.dim();
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        let mut g = Vec::with_capacity(n);
        g.push(C64::new(1.0, 0.0));
        for i in 0..n.saturating_sub(1) {
            let (lo, up) = (self.sub[i], self.sup[i]);
            if lo.norm() == 0.0 || up.norm() == 0.0 {
                return Err(Error::Eigensolver(format!("zero off-diagonal at {i}; matrix is reducible")));
            }
            let ratio = ratio(up, lo).sqrt();
            off.push(lo * ratio);
            g.push(g[i] * ratio);
        }
        Ok((off, g))
    }
}

/// `a / b` without underflow in `|b|^2`.
fn ratio(a: C64, b: C64) -> C64 {
    let s = b.norm();
    (a / s) / (b / s)
}

/// Eigenvalues and tracked rows `v S` of a complex symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub theta: Vec<C64>,
    pub rows: Vec<Vec<C64>>,
}

/// Diagonalizes the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off`, applying every rotation to the supplied `rows`.
pub fn eigen_symmetric(diag: &[C64], off: &[C64], rows: Vec<Vec<C64>>) -> Result<SymmetricEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty tridiagonal matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: off.len() });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: r.len() });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(C64::new(0.0, 0.0));
    let mut rows = rows;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Eigensolver(format!("QL iteration stalled at eigenvalue {l}")));
            }
            let g0 = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r0 = hypot(g0, one);
            let denom = if (g0 + r0).norm() >= (g0 - r0).norm() { g0 + r0 } else { g0 - r0 };
            let mut g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c, mut p) = (one, one, zero);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                let r = hypot(f, g);
                e[i + 1] = r;
                if r.norm() == 0.0 {
                    d[i + 1] -= p;
                    e[m] = zero;
                    deflated = true;
                    break;
                }
                if r.norm() < 1e-8 * (f.norm() + g.norm()) {
                    return Err(Error::Eigensolver(format!(
                        "near-isotropic rotation at index {i}; matrix is close to defective"
                    )));
                }
                s = f / r;
                c = g / r;
                let gg = d[i + 1] - p;
                let rr = (d[i] - gg) * s + 2.0 * c * b;
                p = s * rr;
                d[i + 1] = gg + p;
                g = c * rr - b;
                for row in rows.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
        }
    }
    if d.iter().any(|z| !z.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    Ok(SymmetricEigen { theta: d, rows })
}

/// `sqrt(a^2 + b^2)` without avoidable overflow.
fn hypot(a: C64, b: C64) -> C64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let (a, b) = (a / scale, b / scale);
    (a * a + b * b).sqrt() * scale
}

/// Identity rows, so that `eigen_symmetric` returns the full `S`.
pub fn identity_rows(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|i| {
            let mut r = vec![C64::new(0.0, 0.0); n];
            r[i] = C64::new(1.0, 0.0);
            r
        })
        .collect()
}
