//! Renormalized complex-symmetric bi-Lanczos.
//!
//! With the bilinear form `<x, y>_M = x^T M y` (no conjugation), the
//! recursion
//!
//! ```text
//! zeta_{i+1} w_{i+1} = A w_i - alpha_i w_i - (delta_i / delta_{i-1}) zeta_i w_{i-1}
//! delta_i = w_i^T M w_i,   alpha_i = w_i^T M A w_i / delta_i,   |w_i| = 1
//! ```
//!
//! yields `A W_m = W_m T_m + zeta_{m+1} w_{m+1} e_m^T` with `T_m` tridiagonal,
//! subdiagonal `zeta_{i+1}` and superdiagonal `delta_{i+1} zeta_{i+1} / delta_i`.
//! Only the rows of `W_m` at the probe nodes are kept unless the full basis
//! is requested. The last two basis vectors are retained so a run can be
//! extended later.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::operator::WaveOperator;
use crate::tridiag::Tridiagonal;
use crate::C64;

const MAGIC: &[u8; 8] = b"WCLANCZ1";

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    pub breakdown_tol: f64,
    pub keep_basis: bool,
    /// Steps between local quasi-orthogonality checks; 0 disables them.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { breakdown_tol: 1e-14, keep_basis: false, check_every: 500 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosDecomposition {
    pub n: usize,
    pub alpha: Vec<C64>,
    pub delta: Vec<C64>,
    /// `zeta_1 ..= zeta_{m+1}`.
    pub zeta: Vec<C64>,
    pub probes: Vec<usize>,
    /// `probe_rows[p][i]` is entry `probes[p]` of `w_{i+1}`.
    pub probe_rows: Vec<Vec<C64>>,
    pub basis: Option<Vec<Vec<C64>>>,
    /// `(w_m, w_{m+1})`, needed to continue the recursion.
    pub tail: Option<(Vec<C64>, Vec<C64>)>,
    /// `(step, |w_{i+1}^T M w_i| / sum |m_j w_{i+1,j} w_{i,j}|)` at each check.
    pub orthogonality_log: Vec<(usize, f64)>,
}

impl LanczosDecomposition {
    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn zeta1(&self) -> C64 {
        self.zeta[0]
    }

    pub fn zeta_next(&self) -> C64 {
        self.zeta[self.m()]
    }

    /// Leading `m x m` block of the projected matrix.
    pub fn tridiagonal(&self, m: usize) -> Result<Tridiagonal> {
        if m == 0 || m > self.m() {
            return Err(Error::InvalidParameter(format!("requested m = {m}, decomposition has {}", self.m())));
        }
        let sub: Vec<C64> = (0..m - 1).map(|i| self.zeta[i + 1]).collect();
        let sup: Vec<C64> = (0..m - 1).map(|i| self.delta[i + 1] / self.delta[i] * self.zeta[i + 1]).collect();
        Ok(Tridiagonal { diag: self.alpha[..m].to_vec(), sub, sup })
    }

    /// Writes the checkpoint: magic, `m`, `N`, probe count, probe indices,
    /// tail flag, then little-endian interleaved `(re, im)` arrays `alpha`,
    /// `delta`, `zeta`, the probe rows and, if present, the two tail vectors.
    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        for v in [self.m(), self.n, self.probes.len()] {
            out.write_all(&(v as u64).to_le_bytes())?;
        }
        for &p in &self.probes {
            out.write_all(&(p as u64).to_le_bytes())?;
        }
        out.write_all(&(self.tail.is_some() as u64).to_le_bytes())?;
        let mut put = |xs: &[C64]| -> Result<()> {
            for z in xs {
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
            Ok(())
        };
        put(&self.alpha)?;
        put(&self.delta)?;
        put(&self.zeta)?;
        for row in &self.probe_rows {
            put(row)?;
        }
        if let Some((a, b)) = &self.tail {
            put(a)?;
            put(b)?;
        }
        Ok(())
    }

    pub fn load<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(|_| Error::Checkpoint("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let mut word = || -> Result<usize> {
            let mut b = [0u8; 8];
            input.read_exact(&mut b).map_err(|_| Error::Checkpoint("truncated header".into()))?;
            Ok(u64::from_le_bytes(b) as usize)
        };
        let m = word()?;
        let n = word()?;
        let np = word()?;
        let probes = (0..np).map(|_| word()).collect::<Result<Vec<_>>>()?;
        let has_tail = word()? != 0;
        if probes.iter().any(|&p| p >= n) {
            return Err(Error::Checkpoint("probe index out of range".into()));
        }
        let mut get = |len: usize| -> Result<Vec<C64>> {
            let mut buf = vec![0u8; 16 * len];
            input.read_exact(&mut buf).map_err(|_| Error::Checkpoint("truncated data".into()))?;
            Ok(buf
                .chunks_exact(16)
                .map(|c| {
                    C64::new(
                        f64::from_le_bytes(c[..8].try_into().unwrap()),
                        f64::from_le_bytes(c[8..].try_into().unwrap()),
                    )
                })
                .collect())
        };
        let alpha = get(m)?;
        let delta = get(m)?;
        let zeta = get(m + 1)?;
        let probe_rows = (0..np).map(|_| get(m)).collect::<Result<Vec<_>>>()?;
        let tail = if has_tail { Some((get(n)?, get(n)?)) } else { None };
        Ok(Self { n, alpha, delta, zeta, probes, probe_rows, basis: None, tail, orthogonality_log: Vec::new() })
    }
}

fn bilinear(x: &[C64], mass: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(mass).zip(y).map(|((a, m), b)| a * m * b).sum()
}

/// `sum |m_i| |x_i| |y_i|`, the size `x^T M y` would have without cancellation.
fn bilinear_scale(x: &[C64], mass: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(mass).zip(y).map(|((a, m), b)| a.norm() * m.norm() * b.norm()).sum()
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Runs `m` steps from the start vector `b`.
pub fn bilanczos(
    op: &WaveOperator,
    b: &[C64],
    m: usize,
    probes: &[usize],
    opts: &LanczosOptions,
) -> Result<LanczosDecomposition> {
    if b.len() != op.n {
        return Err(Error::DimensionMismatch { expected: op.n, got: b.len() });
    }
    if m == 0 || m > op.n {
        return Err(Error::InvalidParameter(format!("m = {m} must lie in 1..={}", op.n)));
    }
    if let Some(&p) = probes.iter().find(|&&p| p >= op.n) {
        return Err(Error::InvalidParameter(format!("probe index {p} out of range")));
    }
    let zeta1 = norm2(b);
    if zeta1 == 0.0 {
        return Err(Error::InvalidParameter("zero start vector".into()));
    }
    let w1: Vec<C64> = b.iter().map(|z| z / zeta1).collect();
    let mut dec = LanczosDecomposition {
        n: op.n,
        alpha: Vec::with_capacity(m),
        delta: Vec::with_capacity(m),
        zeta: vec![C64::new(zeta1, 0.0)],
        probes: probes.to_vec(),
        probe_rows: vec![Vec::with_capacity(m); probes.len()],
        basis: opts.keep_basis.then(Vec::new),
        tail: Some((vec![C64::new(0.0, 0.0); op.n], w1)),
        orthogonality_log: Vec::new(),
    };
    extend(op, &mut dec, m, opts)?;
    Ok(dec)
}

/// Continues the recursion until the decomposition has `m_new` steps.
pub fn extend(op: &WaveOperator, dec: &mut LanczosDecomposition, m_new: usize, opts: &LanczosOptions) -> Result<()> {
    if dec.n != op.n {
        return Err(Error::DimensionMismatch { expected: op.n, got: dec.n });
    }
    if m_new > op.n {
        return Err(Error::InvalidParameter(format!("m = {m_new} exceeds N = {}", op.n)));
    }
    if dec.basis.is_some() && dec.basis.as_ref().map(|b| b.len()) != Some(dec.m()) {
        return Err(Error::InvalidParameter("stored basis is incomplete".into()));
    }
    let (mut w_prev, mut w) = dec
        .tail
        .take()
        .ok_or_else(|| Error::Checkpoint("decomposition has no tail vectors to continue from".into()))?;
    let mut v = vec![C64::new(0.0, 0.0); op.n];

    while dec.m() < m_new {
        let i = dec.m();
        op.matvec_into(&w, &mut v)?;
        let delta = bilinear(&w, &op.mass, &w);
        let scale = bilinear_scale(&w, &op.mass, &w);
        if delta.norm() < opts.breakdown_tol * scale {
            dec.tail = Some((w_prev, w));
            return Err(Error::Breakdown { index: i + 1, delta_abs: delta.norm() });
        }
        let alpha = bilinear(&w, &op.mass, &v) / delta;
        let back = if i == 0 { C64::new(0.0, 0.0) } else { delta / dec.delta[i - 1] * dec.zeta[i] };
        for k in 0..op.n {
            v[k] -= alpha * w[k] + back * w_prev[k];
        }
        let zeta = norm2(&v);

        dec.alpha.push(alpha);
        dec.delta.push(delta);
        dec.zeta.push(C64::new(zeta, 0.0));
        for (row, &p) in dec.probe_rows.iter_mut().zip(&dec.probes) {
            row.push(w[p]);
        }
        if let Some(basis) = dec.basis.as_mut() {
            basis.push(w.clone());
        }

        // an exact invariant subspace leaves the next vector undefined
        let next: Vec<C64> =
            if zeta > 0.0 { v.iter().map(|z| z / zeta).collect() } else { vec![C64::new(0.0, 0.0); op.n] };
        if opts.check_every > 0 && (i + 1).is_multiple_of(opts.check_every) {
            let q = bilinear(&next, &op.mass, &w).norm() / bilinear_scale(&next, &op.mass, &w);
            dec.orthogonality_log.push((i + 1, q));
        }
        w_prev = std::mem::replace(&mut w, next);
        if zeta == 0.0 && dec.m() < m_new {
            dec.tail = Some((w_prev, w));
            return Err(Error::Breakdown { index: i + 2, delta_abs: 0.0 });
        }
    }
    dec.tail = Some((w_prev, w));
    Ok(())
}

/// `|A W_m - W_m T_m - zeta_{m+1} w_{m+1} e_m^T|_F`; needs the full basis.
pub fn decomposition_residual(op: &WaveOperator, dec: &LanczosDecomposition) -> Result<f64> {
    let basis = dec.basis.as_ref().ok_or_else(|| Error::InvalidParameter("full basis not stored".into()))?;
    let m = dec.m();
    let t = dec.tridiagonal(m)?;
    let w_next = &dec.tail.as_ref().ok_or_else(|| Error::InvalidParameter("missing tail".into()))?.1;
    let mut total = 0.0;
    for j in 0..m {
        let mut r = op.matvec(&basis[j])?;
        for k in 0..op.n {
            let mut s = t.diag[j] * basis[j][k];
            if j > 0 {
                s += t.sup[j - 1] * basis[j - 1][k];
            }
            if j + 1 < m {
                s += t.sub[j] * basis[j + 1][k];
            } else {
                s += dec.zeta[m] * w_next[k];
            }
            r[k] -= s;
        }
        total += r.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagonal_operator(d: &[f64]) -> WaveOperator {
        let n = d.len();
        WaveOperator {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.iter().map(|&x| C64::new(x, 0.0)).collect(),
            mass: vec![C64::new(1.0, 0.0); n],
        }
    }

    #[test]
    fn two_by_two_projection() {
        let op = diagonal_operator(&[1.0, 2.0]);
        let s = 1.0 / 2f64.sqrt();
        let b = vec![C64::new(s, 0.0); 2];
        let dec = bilanczos(&op, &b, 2, &[0], &LanczosOptions::default()).unwrap();
        let t = dec.tridiagonal(2).unwrap();
        for (z, want) in t.diag.iter().zip([1.5, 1.5]) {
            assert!((z - want).norm() < 1e-15);
        }
        assert!((t.sub[0] - 0.5).norm() < 1e-15);
        assert!((t.sup[0] - 0.5).norm() < 1e-15);
        assert!((dec.zeta1() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn zero_start_rejected() {
        let op = diagonal_operator(&[1.0, 2.0]);
        assert!(bilanczos(&op, &[C64::new(0.0, 0.0); 2], 1, &[], &LanczosOptions::default()).is_err());
        assert!(bilanczos(&op, &[C64::new(1.0, 0.0); 2], 3, &[], &LanczosOptions::default()).is_err());
    }

    #[test]
    fn isotropic_start_breaks_down() {
        let op = diagonal_operator(&[1.0, 2.0]);
        // w^T w = 0 for w = (1, i)/sqrt 2
        let b = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let err = bilanczos(&op, &b, 2, &[], &LanczosOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Breakdown { index: 1, .. }));
    }

    #[test]
    fn checkpoint_round_trip_and_resume() {
        let d: Vec<f64> = (1..=30).map(|i| i as f64 * 0.37).collect();
        let op = diagonal_operator(&d);
        let b: Vec<C64> = (0..30).map(|i| C64::new(1.0 + (i as f64).sin(), 0.1 * i as f64)).collect();
        let opts = LanczosOptions::default();
        let full = bilanczos(&op, &b, 12, &[3, 17], &opts).unwrap();

        let part = bilanczos(&op, &b, 5, &[3, 17], &opts).unwrap();
        let mut bytes = Vec::new();
        part.save(&mut bytes).unwrap();
        let mut resumed = LanczosDecomposition::load(bytes.as_slice()).unwrap();
        assert_eq!(resumed, part);
        extend(&op, &mut resumed, 12, &opts).unwrap();
        assert_eq!(resumed.alpha, full.alpha);
        assert_eq!(resumed.zeta, full.zeta);
        assert_eq!(resumed.probe_rows, full.probe_rows);

        assert!(LanczosDecomposition::load(&bytes[..20]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(LanczosDecomposition::load(bad.as_slice()), Err(Error::Checkpoint(_))));
    }
}
