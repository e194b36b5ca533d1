//! Two-dimensional Yee scheme for `E_z`, `H_x`, `H_y` with a convolutional
//! (auxiliary differential equation) PML.
//!
//! Units are those of the caller: with wave speed `v` the scheme solves
//! `eps E_t = v (dHy/dx - dHx/dy) - v J`, `H_t = v curl E`, so that
//! `eps E_tt = v^2 lap E - v^2 J_t`. With `J = a delta(x) int q` the field
//! matches `u` of `eps u_tt / v^2 - lap u = -a q delta(x)`.
//!
//! The stretched derivative in the layer is `d/dx + psi`,
//! `psi^{n+1} = b psi^n + (b - 1) dE/dx`, `b = exp(-sigma dt)`, with a
//! polynomial `sigma` graded for a target normal-incidence reflection.
//! The outermost nodes are perfectly conducting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{SourceSignature, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdtdConfig {
    /// Cell size.
    pub cell: f64,
    pub pml_layers: usize,
    pub pml_order: u32,
    /// Fraction of the Courant limit `cell / (v sqrt 2)`.
    pub courant_fraction: f64,
    pub duration: f64,
    /// Theoretical normal-incidence reflection of the graded layer.
    pub reflection: f64,
    /// Vacuum wave speed.
    pub speed: f64,
}

impl Default for FdtdConfig {
    fn default() -> Self {
        Self {
            cell: 0.01,
            pml_layers: 10,
            pml_order: 3,
            courant_fraction: 1.0,
            duration: 1.0,
            reflection: 1e-5,
            speed: 1.0,
        }
    }
}

impl FdtdConfig {
    pub fn time_step(&self) -> f64 {
        self.courant_fraction * self.cell / (self.speed * std::f64::consts::SQRT_2)
    }

    /// Number of leapfrog steps, `ceil(T / dt)`.
    pub fn steps(&self) -> usize {
        (self.duration / self.time_step() - 1e-9).ceil() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.courant_fraction > 0.0 && self.courant_fraction <= 1.0) {
            return Err(Error::Stability(format!("Courant fraction {} outside (0, 1]", self.courant_fraction)));
        }
        if !(self.cell > 0.0 && self.speed > 0.0 && self.duration > 0.0) {
            return Err(Error::InvalidParameter("cell, speed and duration must be positive".into()));
        }
        if self.pml_layers == 0 {
            return Err(Error::InvalidParameter("need at least one PML layer".into()));
        }
        if !(self.reflection > 0.0 && self.reflection < 1.0) {
            return Err(Error::InvalidParameter(format!("reflection target {} outside (0, 1)", self.reflection)));
        }
        Ok(())
    }
}

/// Relative permittivity on the nodes `(x0 + i cell, y0 + j cell)` of the
/// physical region, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub cell: f64,
    pub eps: Vec<f64>,
}

impl Raster {
    pub fn from_fn(nx: usize, ny: usize, x0: f64, y0: f64, cell: f64, eps: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                v.push(eps(x0 + cell * i as f64, y0 + cell * j as f64));
            }
        }
        Self { nx, ny, x0, y0, cell, eps: v }
    }

    /// Square `[-half, half]^2` with `n` cells per side.
    pub fn square(half: f64, n: usize, eps: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(n + 1, n + 1, -half, -half, 2.0 * half / n as f64, eps)
    }

    fn nearest(&self, x: f64, y: f64) -> Result<(usize, usize)> {
        let i = ((x - self.x0) / self.cell).round();
        let j = ((y - self.y0) / self.cell).round();
        if i < 0.0 || j < 0.0 || i as usize >= self.nx || j as usize >= self.ny {
            return Err(Error::InvalidParameter(format!("point ({x}, {y}) outside the physical region")));
        }
        Ok((i as usize, j as usize))
    }
}

/// Time-stepping state on the padded grid.
#[derive(Debug, Clone)]
pub struct FdtdSolver {
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub pad: usize,
    cfg: FdtdConfig,
    eps: Vec<f64>,
    pub ez: Vec<f64>,
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
    ez_prev: Vec<f64>,
    psi_ex: Vec<f64>,
    psi_ey: Vec<f64>,
    psi_hx: Vec<f64>,
    psi_hy: Vec<f64>,
    /// Decay factors at integer and half-integer positions per axis.
    bx_int: Vec<f64>,
    bx_half: Vec<f64>,
    by_int: Vec<f64>,
    by_half: Vec<f64>,
    pub step_count: usize,
}

fn profile(n: usize, pad: usize, cfg: &FdtdConfig, dt: f64, shift: f64, enabled: bool) -> Vec<f64> {
    let depth = pad as f64 * cfg.cell;
    let sigma_max =
        if enabled { -(cfg.pml_order as f64 + 1.0) * cfg.speed * cfg.reflection.ln() / (2.0 * depth) } else { 0.0 };
    let inner_lo = pad as f64;
    let inner_hi = (n - 1 - pad) as f64;
    (0..n)
        .map(|i| {
            let x = i as f64 + shift;
            let d = if x < inner_lo {
                inner_lo - x
            } else if x > inner_hi {
                x - inner_hi
            } else {
                0.0
            };
            let sigma = sigma_max * (d / pad as f64).powi(cfg.pml_order as i32);
            (-sigma * dt).exp()
        })
        .collect()
}

impl FdtdSolver {
    /// Pads the raster with `cfg.pml_layers` absorbing cells on every side
    /// (or plain vacuum cells if `absorbing` is false) and a PEC wall.
    pub fn new(raster: &Raster, cfg: &FdtdConfig, absorbing: bool) -> Result<Self> {
        cfg.validate()?;
        if (raster.cell - cfg.cell).abs() > 1e-12 * cfg.cell {
            return Err(Error::InvalidParameter("raster and solver cell sizes differ".into()));
        }
        if raster.eps.iter().any(|&e| !(e >= 1.0)) {
            return Err(Error::InvalidParameter("relative permittivity must be >= 1".into()));
        }
        let pad = cfg.pml_layers;
        let (nx, ny) = (raster.nx + 2 * pad, raster.ny + 2 * pad);
        let dt = cfg.time_step();
        let mut eps = vec![1.0; nx * ny];
        for j in 0..raster.ny {
            for i in 0..raster.nx {
                eps[(j + pad) * nx + i + pad] = raster.eps[j * raster.nx + i];
            }
        }
        Ok(Self {
            nx,
            ny,
            dt,
            pad,
            cfg: *cfg,
            eps,
            ez: vec![0.0; nx * ny],
            hx: vec![0.0; nx * ny],
            hy: vec![0.0; nx * ny],
            ez_prev: vec![0.0; nx * ny],
            psi_ex: vec![0.0; nx * ny],
            psi_ey: vec![0.0; nx * ny],
            psi_hx: vec![0.0; nx * ny],
            psi_hy: vec![0.0; nx * ny],
            bx_int: profile(nx, pad, cfg, dt, 0.0, absorbing),
            bx_half: profile(nx, pad, cfg, dt, 0.5, absorbing),
            by_int: profile(ny, pad, cfg, dt, 0.0, absorbing),
            by_half: profile(ny, pad, cfg, dt, 0.5, absorbing),
            step_count: 0,
        })
    }

    /// Padded-grid index of a raster node.
    pub fn index(&self, i: usize, j: usize) -> usize {
        (j + self.pad) * self.nx + i + self.pad
    }

    /// One leapfrog step; `current` is `(index, J^{n+1/2})` pairs.
    pub fn step(&mut self, current: &[(usize, f64)]) {
        let (nx, ny) = (self.nx, self.ny);
        let c = self.cfg.speed * self.dt / self.cfg.cell;
        self.ez_prev.copy_from_slice(&self.ez);

        // Hx at (i, j + 1/2), Hy at (i + 1/2, j)
        for j in 0..ny - 1 {
            let b = self.by_half[j];
            for i in 0..nx {
                let k = j * nx + i;
                let d = self.ez[k + nx] - self.ez[k];
                self.psi_ey[k] = b * self.psi_ey[k] + (b - 1.0) * d;
                self.hx[k] -= c * (d + self.psi_ey[k]);
            }
        }
        for j in 0..ny {
            for i in 0..nx - 1 {
                let b = self.bx_half[i];
                let k = j * nx + i;
                let d = self.ez[k + 1] - self.ez[k];
                self.psi_ex[k] = b * self.psi_ex[k] + (b - 1.0) * d;
                self.hy[k] += c * (d + self.psi_ex[k]);
            }
        }
        // interior E nodes; the outer ring stays zero
        for j in 1..ny - 1 {
            let by = self.by_int[j];
            for i in 1..nx - 1 {
                let bx = self.bx_int[i];
                let k = j * nx + i;
                let dhy = self.hy[k] - self.hy[k - 1];
                let dhx = self.hx[k] - self.hx[k - nx];
                self.psi_hx[k] = bx * self.psi_hx[k] + (bx - 1.0) * dhy;
                self.psi_hy[k] = by * self.psi_hy[k] + (by - 1.0) * dhx;
                self.ez[k] += c / self.eps[k] * ((dhy + self.psi_hx[k]) - (dhx + self.psi_hy[k]));
            }
        }
        let v = self.cfg.speed;
        for &(k, jv) in current {
            self.ez[k] -= self.dt * v * jv / self.eps[k];
        }
        self.step_count += 1;
    }

    /// Leapfrog invariant `sum eps E^n E^{n+1} + |H^{n+1/2}|^2` (halved), in
    /// cell units, taken after a step. Constant in a lossless source-free run.
    pub fn modified_energy(&self) -> f64 {
        let mut e = 0.0;
        for k in 0..self.ez.len() {
            e += self.eps[k] * self.ez[k] * self.ez_prev[k] + self.hx[k] * self.hx[k] + self.hy[k] * self.hy[k];
        }
        0.5 * e
    }
}

#[derive(Debug, Clone)]
pub struct FdtdResult {
    pub waveform: Waveform,
    pub steps: usize,
    pub dt: f64,
}

/// Runs the scheme for `ceil(T / dt)` steps from rest, driven by a point
/// current `amplitude * int q` at the node nearest `source`, and records
/// `E_z` at the probe nodes after every step.
pub fn fdtd_solve(
    raster: &Raster,
    source: (f64, f64),
    amplitude: f64,
    q: &SourceSignature,
    probes: &[(f64, f64)],
    cfg: &FdtdConfig,
) -> Result<FdtdResult> {
    let mut solver = FdtdSolver::new(raster, cfg, true)?;
    let (si, sj) = raster.nearest(source.0, source.1)?;
    let src = solver.index(si, sj);
    let probe_idx = probes
        .iter()
        .map(|&(x, y)| raster.nearest(x, y).map(|(i, j)| solver.index(i, j)))
        .collect::<Result<Vec<_>>>()?;
    let steps = cfg.steps();
    let dt = solver.dt;
    let area = cfg.cell * cfg.cell;
    let mut samples = vec![Vec::with_capacity(steps + 1); probes.len()];
    for (s, &p) in samples.iter_mut().zip(&probe_idx) {
        s.push(solver.ez[p]);
    }
    for n in 0..steps {
        let j = amplitude * q.integral((n as f64 + 0.5) * dt) / area;
        solver.step(&[(src, j)]);
        for (s, &p) in samples.iter_mut().zip(&probe_idx) {
            s.push(solver.ez[p]);
        }
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Stability("FDTD fields became non-finite".into()));
    }
    Ok(FdtdResult { waveform: Waveform::new(0.0, dt, samples)?, steps, dt })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_count_and_courant() {
        let cfg = FdtdConfig { cell: 0.1, duration: 1.0, ..Default::default() };
        let dt = 0.1 / 2f64.sqrt();
        assert!((cfg.time_step() - dt).abs() < 1e-15);
        assert_eq!(cfg.steps(), (1.0 / dt).ceil() as usize);
        let bad = FdtdConfig { courant_fraction: 1.2, ..cfg };
        let raster = Raster::square(1.0, 20, |_, _| 1.0);
        assert!(matches!(FdtdSolver::new(&raster, &bad, true), Err(Error::Stability(_))));
    }

    #[test]
    fn cavity_energy_is_conserved() {
        let raster = Raster::square(1.0, 40, |x, y| if x * x + y * y < 0.2 { 2.5 } else { 1.0 });
        let cfg = FdtdConfig { cell: raster.cell, courant_fraction: 0.95, ..Default::default() };
        let mut s = FdtdSolver::new(&raster, &cfg, false).unwrap();
        // smooth initial field vanishing on the wall, then free evolution
        for j in 1..s.ny - 1 {
            for i in 1..s.nx - 1 {
                let (x, y) = (i as f64 / s.nx as f64 - 0.5, j as f64 / s.ny as f64 - 0.5);
                s.ez[j * s.nx + i] = (-(x * x + y * y) * 80.0).exp();
            }
        }
        s.step(&[]);
        let e0 = s.modified_energy();
        for _ in 0..10_000 {
            s.step(&[]);
        }
        let e1 = s.modified_energy();
        assert!(((e1 - e0) / e0).abs() < 1e-10, "{e0} -> {e1}");
    }
}
