//! Composite staggered grids: uniform real cells on `[-1, 1]`, imaginary
//! layer steps outside.
//!
//! Per axis there are `n_int + 2k + 1` primary nodes. The outermost node on
//! each side carries a homogeneous Dirichlet condition, leaving
//! `n_int + 2k - 1` unknowns. Unknown `u` sits at primary node `u + 1`.
//! Its control width (dual step) is
//!
//! * `2/n_int` in the interior,
//! * `1/n_int + i gamma_hat_1` at the two junction nodes `x = +-1`,
//! * `i gamma_hat_l`, `l >= 2`, inside the layer.
//!
//! Two-dimensional unknowns are ordered row-major with `x` fastest:
//! `index = iy * n + ix`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stieltjes::PmlSteps;
use crate::C64;

#[derive(Debug, Clone, Serialize)]
pub struct Axis1D {
    pub n_int: usize,
    pub k: usize,
    pub primary_nodes: Vec<C64>,
    pub dual_nodes: Vec<C64>,
    /// `primary_nodes[j + 1] - primary_nodes[j]`.
    pub primary_steps: Vec<C64>,
    /// `dual_nodes[j + 1] - dual_nodes[j]`: control width of primary node `j + 1`.
    pub dual_steps: Vec<C64>,
    /// Primary node indices `[first, last]` of the real segment `[-1, 1]`.
    pub interior_range: (usize, usize),
}

impl Axis1D {
    /// Interior cell width `2 / n_int`.
    pub fn cell(&self) -> f64 {
        2.0 / self.n_int as f64
    }

    pub fn unknowns(&self) -> usize {
        self.primary_nodes.len() - 2
    }

    /// Coordinate of unknown `u`.
    pub fn node(&self, u: usize) -> C64 {
        self.primary_nodes[u + 1]
    }

    /// Steps to the left and right neighbours of unknown `u`.
    pub fn steps_around(&self, u: usize) -> (C64, C64) {
        (self.primary_steps[u], self.primary_steps[u + 1])
    }

    pub fn width(&self, u: usize) -> C64 {
        self.dual_steps[u]
    }

    /// True for unknowns strictly inside `(-1, 1)`.
    pub fn is_interior(&self, u: usize) -> bool {
        let j = u + 1;
        j > self.interior_range.0 && j < self.interior_range.1
    }

    /// Unknown closest to a real coordinate in `(-1, 1)`.
    pub fn nearest_unknown(&self, x: f64) -> Result<usize> {
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::InvalidParameter(format!("coordinate {x} outside the open interior (-1, 1)")));
        }
        let cell = ((x + 1.0) / self.cell()).round() as usize;
        let cell = cell.clamp(1, self.n_int - 1);
        Ok(self.interior_range.0 + cell - 1)
    }

    /// Real coordinate of an interior unknown.
    pub fn coordinate(&self, u: usize) -> f64 {
        self.node(u).re
    }
}

/// Lays out one axis from the interior resolution and the layer steps.
pub fn build_axis(n_int: usize, steps: &PmlSteps) -> Result<Axis1D> {
    if n_int < 2 || !n_int.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n_int must be even and >= 2, got {n_int}")));
    }
    if steps.gamma.len() != steps.gamma_hat.len() {
        return Err(Error::InvalidParameter("layer step vectors differ in length".into()));
    }
    let k = steps.k();
    let cell = 2.0 / n_int as f64;

    let mut primary = Vec::with_capacity(n_int + 2 * k + 1);
    let mut depth = 0.0;
    let mut left = Vec::with_capacity(k);
    for &g in &steps.gamma {
        depth += g;
        left.push(C64::new(-1.0, -depth));
    }
    primary.extend(left.iter().rev());
    for j in 0..=n_int {
        // exact zero at the midpoint
        let x = if 2 * j == n_int { 0.0 } else { -1.0 + cell * j as f64 };
        primary.push(C64::new(x, 0.0));
    }
    primary.extend(left.iter().map(|z| -z));

    let mut dual = Vec::with_capacity(n_int + 2 * k);
    let mut depth = 0.0;
    let mut left_dual = Vec::with_capacity(k);
    for &g in &steps.gamma_hat {
        depth += g;
        left_dual.push(C64::new(-1.0, -depth));
    }
    dual.extend(left_dual.iter().rev());
    for j in 0..n_int {
        dual.push(C64::new(-1.0 + cell * (j as f64 + 0.5), 0.0));
    }
    dual.extend(left_dual.iter().map(|z| -z));

    let primary_steps: Vec<C64> = primary.windows(2).map(|w| w[1] - w[0]).collect();
    let dual_steps: Vec<C64> = dual.windows(2).map(|w| w[1] - w[0]).collect();

    Ok(Axis1D {
        n_int,
        k,
        primary_nodes: primary,
        dual_nodes: dual,
        primary_steps,
        dual_steps,
        interior_range: (k, k + n_int),
    })
}

/// Tensor-product grid with identical axes.
#[derive(Debug, Clone, Serialize)]
pub struct Grid2D {
    pub axis_x: Axis1D,
    pub axis_y: Axis1D,
    /// Unknowns per axis.
    pub n: usize,
    pub interior_mask: Vec<bool>,
}

impl Grid2D {
    /// Total number of unknowns `N = n^2`.
    pub fn unknown_count(&self) -> usize {
        self.n * self.n
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.n, index / self.n)
    }

    pub fn node(&self, index: usize) -> (C64, C64) {
        let (ix, iy) = self.coords(index);
        (self.axis_x.node(ix), self.axis_y.node(iy))
    }

    /// Unknown closest to a physical point of the open interior.
    pub fn nearest_node(&self, x: f64, y: f64) -> Result<usize> {
        Ok(self.index(self.axis_x.nearest_unknown(x)?, self.axis_y.nearest_unknown(y)?))
    }

    /// Control area `w_x * w_y` of an unknown.
    pub fn dual_area(&self, index: usize) -> C64 {
        let (ix, iy) = self.coords(index);
        self.axis_x.width(ix) * self.axis_y.width(iy)
    }

    /// CSV dump of unknown coordinates: `index,ix,iy,x_re,x_im,y_re,y_im,interior`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,ix,iy,x_re,x_im,y_re,y_im,interior")?;
        for idx in 0..self.unknown_count() {
            let (ix, iy) = self.coords(idx);
            let (x, y) = self.node(idx);
            writeln!(
                out,
                "{idx},{ix},{iy},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                x.re, x.im, y.re, y.im, self.interior_mask[idx] as u8
            )?;
        }
        Ok(())
    }
}

pub fn build_grid2d(axis: Axis1D) -> Grid2D {
    let n = axis.unknowns();
    let interior_mask = (0..n * n).map(|idx| axis.is_interior(idx % n) && axis.is_interior(idx / n)).collect();
    Grid2D { axis_y: axis.clone(), axis_x: axis, n, interior_mask }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_level(g: f64, gh: f64) -> PmlSteps {
        PmlSteps { gamma: vec![g], gamma_hat: vec![gh] }
    }

    #[test]
    fn hand_built_small_axis() {
        let axis = build_axis(2, &one_level(0.7, 0.3)).unwrap();
        let expect =
            [C64::new(-1.0, -0.7), C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.7)];
        assert_eq!(axis.primary_nodes, expect);
        assert_eq!(axis.primary_steps.len(), 2 + 2);
        assert_eq!(axis.unknowns(), 3);
        // junction widths: half cell plus i gamma_hat_1
        assert_eq!(axis.width(0), C64::new(0.5, 0.3));
        assert_eq!(axis.width(1), C64::new(1.0, 0.0));
        assert_eq!(axis.width(2), C64::new(0.5, 0.3));
    }

    #[test]
    fn odd_resolution_rejected() {
        assert!(build_axis(3, &PmlSteps::none()).is_err());
        assert!(build_axis(0, &PmlSteps::none()).is_err());
    }

    #[test]
    fn axis_symmetric_and_staggered() {
        let steps = PmlSteps { gamma: vec![0.1, 0.3, 0.9], gamma_hat: vec![0.05, 0.2, 0.6] };
        let axis = build_axis(8, &steps).unwrap();
        let n = axis.primary_nodes.len();
        for j in 0..n {
            assert!((axis.primary_nodes[j] + axis.primary_nodes[n - 1 - j]).norm() < 1e-15);
        }
        let m = axis.dual_nodes.len();
        for j in 0..m {
            assert!((axis.dual_nodes[j] + axis.dual_nodes[m - 1 - j]).norm() < 1e-15);
        }
        let (a, b) = axis.interior_range;
        for j in a..b {
            let mid = 0.5 * (axis.primary_nodes[j] + axis.primary_nodes[j + 1]);
            assert!((axis.dual_nodes[j] - mid).norm() < 1e-15);
            assert!((axis.primary_steps[j] - C64::new(0.25, 0.0)).norm() < 1e-15);
        }
        for u in 0..axis.unknowns() {
            let w = axis.width(u);
            let j = u + 1;
            if j == a || j == b {
                assert!((w.re - 0.125).abs() < 1e-15 && (w.im - 0.05).abs() < 1e-15);
            } else if j > a && j < b {
                assert!((w - C64::new(0.25, 0.0)).norm() < 1e-15);
            } else {
                assert_eq!(w.re, 0.0);
                assert!(w.im > 0.0);
            }
        }
    }

    #[test]
    fn grid_counts() {
        let grid = build_grid2d(build_axis(2, &one_level(1.0, 1.0)).unwrap());
        assert_eq!(grid.unknown_count(), 9);
        assert_eq!(grid.interior_mask.iter().filter(|&&b| b).count(), 1);

        let steps = PmlSteps { gamma: vec![0.1, 0.2], gamma_hat: vec![0.1, 0.2] };
        let grid = build_grid2d(build_axis(10, &steps).unwrap());
        assert_eq!(grid.unknown_count(), (10 + 4 - 1) * (10 + 4 - 1));
        assert_eq!(grid.interior_mask.iter().filter(|&&b| b).count(), 81);
        for idx in 0..grid.unknown_count() {
            let (ix, iy) = grid.coords(idx);
            assert_eq!(grid.index(ix, iy), idx);
        }
    }

    #[test]
    fn nearest_node_snaps() {
        let grid = build_grid2d(build_axis(10, &PmlSteps::none()).unwrap());
        let idx = grid.nearest_node(0.0, 0.41).unwrap();
        let (x, y) = grid.node(idx);
        assert_eq!(x.re, 0.0);
        assert!((y.re - 0.4).abs() < 1e-15);
        assert!(grid.nearest_node(1.0, 0.0).is_err());
    }
}
