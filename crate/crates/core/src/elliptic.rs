//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything is parameterised by `m = k^2`, the squared modulus. Complete
//! integrals use the arithmetic-geometric mean; `sn`, `cn`, `dn` use the
//! descending Landen (AGM) scheme of Abramowitz & Stegun 16.4.

use std::f64::consts::FRAC_PI_2;

const MAX_AGM_STEPS: usize = 64;

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(m)`, `0 <= m < 1`.
pub fn ellip_k(m: f64) -> f64 {
    assert!((0.0..1.0).contains(&m), "parameter m = {m} outside [0, 1)");
    FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt())
}

/// Complete integral of the complementary parameter, `K'(m) = K(1 - m)`.
///
/// Takes `m1 = 1 - m` directly so that moduli close to one keep full precision.
pub fn ellip_k_from_complement(m1: f64) -> f64 {
    assert!(m1 > 0.0 && m1 <= 1.0, "complementary parameter {m1} outside (0, 1]");
    FRAC_PI_2 / agm(1.0, m1.sqrt())
}

/// Values of the Jacobi elliptic functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi elliptic functions `sn(u|m)`, `cn(u|m)`, `dn(u|m)` for `0 <= m <= 1`.
pub fn jacobi(u: f64, m: f64) -> Jacobi {
    assert!((0.0..=1.0).contains(&m), "parameter m = {m} outside [0, 1]");
    if m < 1e-16 {
        let (s, c) = u.sin_cos();
        return Jacobi { sn: s, cn: c, dn: 1.0 };
    }
    if 1.0 - m < 1e-16 {
        let t = u.tanh();
        let sech = 1.0 / u.cosh();
        return Jacobi { sn: t, cn: sech, dn: sech };
    }

    let mut a = [0.0; MAX_AGM_STEPS];
    let mut c = [0.0; MAX_AGM_STEPS];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while c[n].abs() > f64::EPSILON && n + 1 < MAX_AGM_STEPS {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }

    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    Jacobi { sn, cn, dn }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_at_zero_is_half_pi() {
        assert!((ellip_k(0.0) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn k_reference_values() {
        // K(1/2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let k_half = 1.854_074_677_301_372;
        assert!((ellip_k(0.5) - k_half).abs() < 1e-14);
        // K(0.99) = 3.695637362989875
        assert!((ellip_k(0.99) - 3.695_637_362_989_875).abs() < 1e-12);
        assert!((ellip_k_from_complement(0.01) - ellip_k(0.99)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_identities_hold() {
        for &m in &[0.1, 0.5, 0.9, 0.9999] {
            let kk = ellip_k(m);
            for i in 0..=20 {
                let u = kk * i as f64 / 20.0;
                let j = jacobi(u, m);
                assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-13);
                assert!((j.dn * j.dn + m * j.sn * j.sn - 1.0).abs() < 1e-13);
            }
            // quarter period: sn(K) = 1, cn(K) = 0, dn(K) = sqrt(1 - m)
            let j = jacobi(kk, m);
            assert!((j.sn - 1.0).abs() < 1e-12);
            assert!(j.cn.abs() < 1e-7);
            assert!((j.dn - (1.0 - m).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_derivative_matches_cn_dn() {
        // d sn / du = cn dn, checked by central differences
        let m = 0.7;
        let h = 1e-5;
        for &u in &[0.1, 0.6, 1.3, 2.0] {
            let d = (jacobi(u + h, m).sn - jacobi(u - h, m).sn) / (2.0 * h);
            let j = jacobi(u, m);
            assert!((d - j.cn * j.dn).abs() < 1e-9);
        }
    }
}
