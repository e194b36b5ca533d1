//! Small dense complex matrix functions used as oracles and for the
//! stability-corrected resolvent.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Principal square root; errors on the closed negative real axis.
pub fn principal_sqrt(z: C64) -> Result<C64> {
    if on_cut(z) {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    Ok(z.sqrt())
}

/// True for `z` in `(-inf, 0]`.
pub fn on_cut(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

/// Complex Schur form `A = Q T Q^H` with `T` upper triangular.
pub fn schur(a: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = a.nrows();
    let s = a
        .clone()
        .try_schur(f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::Eigensolver("Schur iteration did not converge".into()))?;
    Ok(s.unpack())
}

/// Principal square root of a matrix with spectrum off the cut, via the
/// Schur form and the triangular recurrence.
pub fn sqrtm(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = a.nrows();
    let (q, t) = schur(a)?;
    let mut r = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = principal_sqrt(t[(i, i)])?;
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    Ok(&q * r * q.adjoint())
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>> {
    a.clone().lu().solve(b).ok_or_else(|| Error::Eigensolver("singular matrix in dense solve".into()))
}

/// `exp(-sqrt(A) t) sqrt(A)^{-1} b` for each `t`, by scaling and squaring.
pub fn sctde_dense(a: &DMatrix<C64>, b: &DVector<C64>, times: &[f64]) -> Result<Vec<DVector<C64>>> {
    let root = sqrtm(a)?;
    let y = solve(&root, b)?;
    Ok(times
        .iter()
        .map(|&t| if t < 0.0 { DVector::zeros(b.len()) } else { (&root * C64::new(-t, 0.0)).exp() * &y })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_matrix(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut a = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for i in 0..n {
            a[(i, i)] += C64::new(2.0 * n as f64, 0.0);
        }
        a
    }

    #[test]
    fn principal_root_convention() {
        assert_eq!(principal_sqrt(C64::new(4.0, 0.0)).unwrap(), C64::new(2.0, 0.0));
        let r = principal_sqrt(C64::new(0.0, 1.0)).unwrap();
        assert!((r - C64::new(1.0, 1.0) / 2f64.sqrt()).norm() < 1e-15);
        assert!(principal_sqrt(C64::new(-1.0, 0.0)).is_err());
        assert!(principal_sqrt(C64::new(0.0, 0.0)).is_err());
        assert!(principal_sqrt(C64::new(-1.0, 1e-300)).unwrap().re > 0.0);
    }

    #[test]
    fn sqrtm_squares_back() {
        let a = random_matrix(12, 3);
        let r = sqrtm(&a).unwrap();
        let err = (&r * &r - &a).norm() / a.norm();
        assert!(err < 1e-12, "{err}");
        // principal: eigenvalues of the root in the right half-plane
        for z in r.eigenvalues().unwrap().iter() {
            assert!(z.re > 0.0);
        }
    }

    #[test]
    fn sqrtm_rejects_negative_spectrum() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0)]));
        assert!(matches!(sqrtm(&a), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn sctde_dense_diagonal_case() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(4.0, 0.0), C64::new(0.0, 1.0)]));
        let b = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let out = sctde_dense(&a, &b, &[0.0, 1.0]).unwrap();
        assert!((out[1][0] - C64::new((-2.0f64).exp() / 2.0, 0.0)).norm() < 1e-14);
        assert!((out[0][1] - C64::new(1.0, -1.0) / 2f64.sqrt()).norm() < 1e-14);
    }
}
