//! Five-point operator on a composite grid, its diagonal mass weight, and
//! point sources.
//!
//! With control widths `w` and neighbour steps `h_l`, `h_r` on each axis,
//!
//! ```text
//! (A v)_p = 1/c_p * sum over axes of [ (v_r - v_p)/h_r - (v_p - v_l)/h_l ] / w
//! M_p     = c_p * w_x * w_y
//! ```
//!
//! so that `M A` is complex symmetric. Neighbours on the outermost primary
//! nodes are zero (Dirichlet) and drop out of the matrix.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::C64;

/// Relative permittivity per unknown; one outside the open interior.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumMap {
    pub c_values: Vec<f64>,
}

impl MediumMap {
    pub fn vacuum(grid: &Grid2D) -> Self {
        Self { c_values: vec![1.0; grid.unknown_count()] }
    }

    /// Samples `eps(x, y)` at the interior nodes and sets one elsewhere.
    pub fn from_fn(grid: &Grid2D, eps: impl Fn(f64, f64) -> f64) -> Self {
        let c_values = (0..grid.unknown_count())
            .map(|p| {
                if grid.interior_mask[p] {
                    let (x, y) = grid.node(p);
                    eps(x.re, y.re)
                } else {
                    1.0
                }
            })
            .collect();
        Self { c_values }
    }
}

/// `A` in compressed sparse rows plus the mass diagonal.
#[derive(Debug, Clone)]
pub struct WaveOperator {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<C64>,
    pub mass: Vec<C64>,
}

pub fn assemble(grid: &Grid2D, medium: &MediumMap) -> Result<WaveOperator> {
    let n = grid.unknown_count();
    if medium.c_values.len() != n {
        return Err(Error::Assembly(format!("medium has {} values for {} grid nodes", medium.c_values.len(), n)));
    }
    for (p, &c) in medium.c_values.iter().enumerate() {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Assembly(format!("non-positive coefficient {c} at node {p}")));
        }
        if !grid.interior_mask[p] && c != 1.0 {
            return Err(Error::Assembly(format!("coefficient {c} != 1 at boundary/layer node {p}")));
        }
    }

    let nn = grid.n;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    let mut mass = Vec::with_capacity(n);
    row_ptr.push(0);
    for p in 0..n {
        let (ix, iy) = grid.coords(p);
        let c = medium.c_values[p];
        let (wx, wy) = (grid.axis_x.width(ix), grid.axis_y.width(iy));
        let (hxl, hxr) = grid.axis_x.steps_around(ix);
        let (hyl, hyr) = grid.axis_y.steps_around(iy);

        let down = 1.0 / (c * wy * hyl);
        let left = 1.0 / (c * wx * hxl);
        let right = 1.0 / (c * wx * hxr);
        let up = 1.0 / (c * wy * hyr);
        let centre = -(down + left + right + up);

        // column order ascending
        if iy > 0 {
            col_idx.push(p - nn);
            values.push(down);
        }
        if ix > 0 {
            col_idx.push(p - 1);
            values.push(left);
        }
        col_idx.push(p);
        values.push(centre);
        if ix + 1 < nn {
            col_idx.push(p + 1);
            values.push(right);
        }
        if iy + 1 < nn {
            col_idx.push(p + nn);
            values.push(up);
        }
        row_ptr.push(col_idx.len());
        mass.push(c * wx * wy);
    }
    Ok(WaveOperator { n, row_ptr, col_idx, values, mass })
}

impl WaveOperator {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        self.matvec_into(v, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, v: &[C64], y: &mut [C64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: y.len() });
        }
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[k] * v[self.col_idx[k]];
            }
            *out = acc;
        }
        Ok(())
    }

    /// Largest absolute row sum, an upper bound for the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.values[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mass_norm(&self) -> f64 {
        self.mass.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut a = nalgebra::DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                a[(r, self.col_idx[k])] = self.values[k];
            }
        }
        a
    }

    /// Coordinate text dump: `row col re im`, one-based.
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz())?;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.values[k];
                writeln!(out, "{} {} {:.17e} {:.17e}", r + 1, self.col_idx[k] + 1, v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Discrete point source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceVector {
    pub values: Vec<C64>,
    pub support: Vec<usize>,
}

/// Kronecker delta at the interior node nearest `location`, scaled by
/// `amplitude / (dual cell area)`.
pub fn sample_source(grid: &Grid2D, location: (f64, f64), amplitude: f64) -> Result<SourceVector> {
    let p = grid.nearest_node(location.0, location.1)?;
    let mut values = vec![C64::new(0.0, 0.0); grid.unknown_count()];
    values[p] = amplitude / grid.dual_area(p);
    Ok(SourceVector { values, support: vec![p] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_axis, build_grid2d};
    use crate::stieltjes::{to_continued_fraction, PmlSteps};
    use crate::zolotarev::{zolotarev_approx, SpectralInterval};

    fn pml_grid(n_int: usize, k: usize) -> Grid2D {
        let steps = if k == 0 {
            PmlSteps::none()
        } else {
            let iv = SpectralInterval::new(-((n_int * n_int) as f64), -1.0).unwrap();
            to_continued_fraction(&zolotarev_approx(&iv, k).unwrap()).unwrap()
        };
        build_grid2d(build_axis(n_int, &steps).unwrap())
    }

    fn ring(grid: &Grid2D) -> MediumMap {
        MediumMap::from_fn(grid, |x, y| if (x * x + y * y).sqrt() < 0.5 { 4.0 } else { 1.0 })
    }

    fn symmetry_defect(op: &WaveOperator) -> (f64, f64) {
        let a = op.to_dense();
        let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(op.mass.clone()));
        let ma = m * a;
        (
            (&ma - ma.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max),
            ma.iter().map(|z| z.norm()).fold(0.0, f64::max),
        )
    }

    #[test]
    fn mass_weighted_symmetry() {
        for k in [0, 1, 3] {
            let grid = pml_grid(8, k);
            let op = assemble(&grid, &ring(&grid)).unwrap();
            let (defect, scale) = symmetry_defect(&op);
            assert!(defect <= 1e-12 * scale, "k={k}: {defect} vs {scale}");
        }
    }

    #[test]
    fn at_most_five_per_row_and_real_interior_rows() {
        let grid = pml_grid(10, 3);
        let op = assemble(&grid, &ring(&grid)).unwrap();
        for r in 0..op.n {
            let len = op.row_ptr[r + 1] - op.row_ptr[r];
            assert!(len <= 5);
            if grid.interior_mask[r] {
                let (ix, iy) = grid.coords(r);
                let strict = |u: usize| grid.axis_x.is_interior(u.wrapping_sub(1)) && grid.axis_x.is_interior(u + 1);
                if strict(ix) && strict(iy) {
                    for k in op.row_ptr[r]..op.row_ptr[r + 1] {
                        assert_eq!(op.values[k].im, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        // without a layer the 2D eigenvalues are sums of the 1D ones
        let n_int = 8;
        let grid = pml_grid(n_int, 0);
        let op = assemble(&grid, &MediumMap::vacuum(&grid)).unwrap();
        let mut got: Vec<f64> = op.to_dense().map(|z| z.re).symmetric_eigenvalues().iter().copied().collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = 2.0 / n_int as f64;
        let one_d: Vec<f64> = (1..n_int)
            .map(|j| -4.0 / (h * h) * (std::f64::consts::PI * j as f64 / (2.0 * n_int as f64)).sin().powi(2))
            .collect();
        let mut want: Vec<f64> = one_d.iter().flat_map(|a| one_d.iter().map(move |b| a + b)).collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10 * w.abs());
        }
        assert!(got.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn spectrum_avoids_negative_axis_with_layer() {
        let grid = pml_grid(12, 3);
        let op = assemble(&grid, &ring(&grid)).unwrap();
        assert!(op.n <= 2500);
        let eig = op.to_dense().eigenvalues().unwrap();
        for z in eig.iter() {
            assert!(!(z.re < 0.0 && z.im.abs() <= 1e-8), "eigenvalue {z} on the negative axis");
        }
    }

    #[test]
    fn matvec_columns_and_linearity() {
        let grid = pml_grid(6, 2);
        let op = assemble(&grid, &ring(&grid)).unwrap();
        let dense = op.to_dense();
        let zero = op.matvec(&vec![C64::new(0.0, 0.0); op.n]).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
        for p in [0, 7, op.n - 1] {
            let mut e = vec![C64::new(0.0, 0.0); op.n];
            e[p] = C64::new(1.0, 0.0);
            let col = op.matvec(&e).unwrap();
            for r in 0..op.n {
                assert_eq!(col[r], dense[(r, p)]);
            }
        }
        assert!(matches!(op.matvec(&[C64::new(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn medium_length_checked() {
        let grid = pml_grid(4, 1);
        let bad = MediumMap { c_values: vec![1.0; 3] };
        assert!(matches!(assemble(&grid, &bad), Err(Error::Assembly(_))));
    }

    #[test]
    fn point_source_normalization() {
        let grid = pml_grid(10, 2);
        let medium = ring(&grid);
        let op = assemble(&grid, &medium).unwrap();
        let b = sample_source(&grid, (0.2, -0.4), 3.0).unwrap();
        assert_eq!(b.support.len(), 1);
        assert_eq!(b.values.iter().filter(|z| z.norm() > 0.0).count(), 1);
        let integral: C64 = b.values.iter().zip(&op.mass).map(|(v, m)| v * m).sum();
        let p = b.support[0];
        assert!((integral - 3.0 * medium.c_values[p]).norm() < 1e-12);
        assert_eq!(b, sample_source(&grid, (0.2, -0.4), 3.0).unwrap());
        assert!(sample_source(&grid, (1.2, 0.0), 1.0).is_err());
    }

    #[test]
    fn matrix_market_dump() {
        let grid = pml_grid(4, 1);
        let op = assemble(&grid, &MediumMap::vacuum(&grid)).unwrap();
        let mut buf = Vec::new();
        op.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + op.nnz());
    }
}
