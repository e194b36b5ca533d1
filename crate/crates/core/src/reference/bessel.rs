//! Bessel functions of order zero for real positive arguments.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 12.0;

/// `(J0(x), Y0(x))` for `x > 0`.
pub fn j0_y0(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "Bessel argument must be positive, got {x}");
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

pub fn j0(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    j0_y0(x.abs()).0
}

pub fn y0(x: f64) -> f64 {
    j0_y0(x).1
}

/// `H0^(1)(x) = J0(x) + i Y0(x)`.
pub fn hankel1_0(x: f64) -> C64 {
    let (j, y) = j0_y0(x);
    C64::new(j, y)
}

fn series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        tail -= harmonic * term;
        if term.abs() < 1e-18 * j.abs().max(1e-3) && kf > q.sqrt() {
            break;
        }
    }
    let y = 2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * j + tail);
    (j, y)
}

fn asymptotic(x: f64) -> (f64, f64) {
    // P ~ sum (-1)^k a_{2k} / x^{2k}, Q ~ -sum (-1)^k a_{2k+1} / x^{2k+1},
    // a_k = prod_{j=1}^{k} (2j - 1)^2 / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        if a >= prev {
            break;
        }
        prev = a;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q -= sign * a;
        } else {
            p += sign * a;
        }
        if a < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}
