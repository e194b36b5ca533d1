//! Scenario descriptions in physical units and their normalized form.
//!
//! Lengths are in metres, times in seconds, angular frequencies in rad/s.
//! With half-width `L` of the computational square and reference speed `c0`
//! the solver works with `x' = x / L`, `t' = t c0 / L` and `w' = w L / c0`,
//! so the interior is always `[-1, 1]^2`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{make_wavelet, SourceSignature};
use crate::zolotarev::{compute_interval, SpectralInterval};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Units {
    /// Half-width `L` of the computational square, metres.
    pub length: f64,
    /// Reference wave speed `c0`, m/s.
    pub speed: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { length: 2.0e-6, speed: SPEED_OF_LIGHT }
    }
}

impl Units {
    pub fn length_to_normalized(&self, x: f64) -> f64 {
        x / self.length
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x * self.length
    }

    pub fn time_to_normalized(&self, t: f64) -> f64 {
        t * self.speed / self.length
    }

    pub fn time_to_physical(&self, t: f64) -> f64 {
        t * self.length / self.speed
    }

    pub fn omega_to_normalized(&self, w: f64) -> f64 {
        w * self.length / self.speed
    }

    pub fn omega_to_physical(&self, w: f64) -> f64 {
        w * self.speed / self.length
    }

    /// Seconds per normalized time unit.
    pub fn time_scale(&self) -> f64 {
        self.length / self.speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Band {
    pub omega_min: f64,
    pub omega_max: f64,
    /// Spectral level of the wavelet at the band edges, dB below the peak.
    pub floor_db: f64,
}

impl Default for Band {
    fn default() -> Self {
        Self { omega_min: 2.42e14, omega_max: 2.18e15, floor_db: -30.0 }
    }
}

impl Band {
    pub fn omega_mid(&self) -> f64 {
        0.5 * (self.omega_min + self.omega_max)
    }

    /// Vacuum wavelength at the mid frequency.
    pub fn lambda_mid(&self, speed: f64) -> f64 {
        2.0 * PI * speed / self.omega_mid()
    }

    /// Smallest wavelength of interest in a medium of permittivity `eps`.
    pub fn lambda_min(&self, speed: f64, eps: f64) -> f64 {
        2.0 * PI * speed / (self.omega_max * eps.sqrt())
    }
}

/// Which half-row and half-column of a rod lattice to drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Removal {
    None,
    /// Rods on the negative `x` half of the centre row and the positive `y`
    /// half of the centre column, forming a bend that meets at the centre.
    Bend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Shape {
    Disk {
        center: [f64; 2],
        radius: f64,
        eps: f64,
    },
    Annulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
        eps: f64,
    },
    /// Square lattice of rods centred on the origin, filling the domain.
    RodLattice {
        spacing: f64,
        #[serde(default = "default_rod_fraction")]
        radius_fraction: f64,
        eps: f64,
        #[serde(default = "default_removal")]
        removed: Removal,
    },
}

fn default_rod_fraction() -> f64 {
    0.18
}

fn default_removal() -> Removal {
    Removal::Bend
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSpec {
    pub position: [f64; 2],
    pub amplitude: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self { position: [0.0, 0.0], amplitude: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    /// Interior cells per axis.
    pub n_int: usize,
    /// Zolotarev degree (PML layers per side).
    pub k: usize,
    /// Lower cut of the spectral interval relative to `w_min^2`.
    pub mu: f64,
    /// Minimum distance, in cells, between sources/probes and the PML.
    pub standoff: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self { n_int: 168, k: 9, mu: 0.1, standoff: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    None,
    Analytic,
    Fdtd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solvers {
    /// Lanczos step counts at which traces are evaluated.
    pub m_list: Vec<usize>,
    pub reference: ReferenceKind,
    pub breakdown_tol: f64,
    /// Steps between decomposition checkpoints.
    pub checkpoint_every: usize,
    pub fdtd_pml_layers: usize,
    pub fdtd_courant: f64,
}

impl Default for Solvers {
    fn default() -> Self {
        Self {
            m_list: vec![1000, 2000, 4000],
            reference: ReferenceKind::Fdtd,
            breakdown_tol: 1e-14,
            checkpoint_every: 1000,
            fdtd_pml_layers: 10,
            fdtd_courant: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub units: Units,
    pub band: Band,
    /// Shapes over a vacuum background; later shapes win where they overlap.
    pub geometry: Vec<Shape>,
    pub source: SourceSpec,
    /// Probe positions, metres.
    pub probes: Vec<[f64; 2]>,
    /// End of the observation window, seconds.
    pub window: f64,
    pub discretization: Discretization,
    pub solvers: Solvers,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            units: Units::default(),
            band: Band::default(),
            geometry: Vec::new(),
            source: SourceSpec::default(),
            probes: vec![[0.3e-6, 0.3e-6]],
            window: 4e-13,
            discretization: Discretization::default(),
            solvers: Solvers::default(),
        }
    }
}

impl Scenario {
    /// Free space, receiver on the diagonal `3 lambda_mid` from the source.
    pub fn homogeneous() -> Self {
        let units = Units { length: 4.5e-6, speed: SPEED_OF_LIGHT };
        let band = Band::default();
        let d = 3.0 * band.lambda_mid(units.speed) / 2f64.sqrt();
        Self {
            name: "homogeneous".into(),
            units,
            band,
            geometry: Vec::new(),
            probes: vec![[d, d]],
            window: 2e-13,
            discretization: Discretization { n_int: 250, ..Default::default() },
            solvers: Solvers {
                m_list: (1..=10).map(|i| 1000 * i).collect(),
                reference: ReferenceKind::Analytic,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    /// Dielectric annulus with `eps_r = 4` around the source.
    pub fn ring() -> Self {
        let units = Units { length: 2.0e-6, speed: SPEED_OF_LIGHT };
        Self {
            name: "ring".into(),
            units,
            geometry: vec![Shape::Annulus {
                center: [0.0, 0.0],
                inner: 0.35 * units.length,
                outer: 0.55 * units.length,
                eps: 4.0,
            }],
            probes: vec![[0.15 * units.length, 0.15 * units.length]],
            window: 4e-13,
            discretization: Discretization { n_int: 168, ..Default::default() },
            solvers: Solvers { m_list: vec![1000, 2000, 4000, 6000], ..Default::default() },
            ..Default::default()
        }
    }

    /// Photonic crystal of silicon rods with a bent line defect.
    pub fn waveguide() -> Self {
        let units = Units { length: 2.9e-6, speed: SPEED_OF_LIGHT };
        Self {
            name: "waveguide".into(),
            units,
            band: Band { omega_min: 9.81e14, omega_max: 1.44e15, floor_db: -30.0 },
            geometry: vec![Shape::RodLattice {
                spacing: 0.58e-6,
                radius_fraction: 0.18,
                eps: 11.56,
                removed: Removal::Bend,
            }],
            probes: vec![[-0.6 * units.length, 0.0]],
            window: 4e-13,
            discretization: Discretization { n_int: 272, ..Default::default() },
            solvers: Solvers { m_list: vec![1000, 2000, 4000, 6000, 8000], ..Default::default() },
            ..Default::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "homogeneous" => Ok(Self::homogeneous()),
            "ring" => Ok(Self::ring()),
            "waveguide" => Ok(Self::waveguide()),
            other => Err(Error::Config(format!("unknown preset '{other}' (homogeneous, ring, waveguide)"))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let sc: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML file, or a preset when `path` is `preset:<name>`.
    pub fn load(path: &Path) -> Result<Self> {
        if let Some(name) = path.to_str().and_then(|s| s.strip_prefix("preset:")) {
            return Self::preset(name);
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("scenario '{}': {msg}", self.name)));
        if !(self.units.length > 0.0 && self.units.speed > 0.0) {
            return bad("units must be positive".into());
        }
        if !(self.window > 0.0) {
            return bad(format!("window {} must be positive", self.window));
        }
        let d = &self.discretization;
        if d.n_int < 4 || d.k == 0 || !(d.mu > 0.0 && d.mu <= 1.0) {
            return bad(format!("need n_int >= 4, k >= 1, 0 < mu <= 1 (got {}, {}, {})", d.n_int, d.k, d.mu));
        }
        let s = &self.solvers;
        if s.m_list.is_empty() || s.m_list[0] == 0 || s.m_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad("m_list must be positive and strictly increasing".into());
        }
        if s.checkpoint_every == 0 {
            return bad("checkpoint_every must be positive".into());
        }
        if self.probes.is_empty() {
            return bad("at least one probe is required".into());
        }
        if s.reference == ReferenceKind::Analytic && !self.geometry.is_empty() {
            return bad("the analytic reference needs an empty geometry".into());
        }
        let limit = 1.0 - d.standoff as f64 * 2.0 / d.n_int as f64;
        let inside = |p: [f64; 2]| p.iter().all(|&c| self.units.length_to_normalized(c).abs() <= limit + 1e-12);
        if !inside(self.source.position) {
            return bad("source lies outside the interior or within the PML standoff".into());
        }
        if let Some(p) = self.probes.iter().find(|&&p| !inside(p)) {
            return bad(format!("probe {p:?} lies outside the interior or within the PML standoff"));
        }
        for shape in &self.geometry {
            self.check_shape(shape)?;
        }
        if let Err(e) = make_wavelet(self.band.omega_min, self.band.omega_max, self.band.floor_db) {
            return bad(e.to_string());
        }
        Ok(())
    }

    fn check_shape(&self, shape: &Shape) -> Result<()> {
        let n = |x: f64| self.units.length_to_normalized(x);
        let fits = |c: [f64; 2], r: f64| n(c[0]).abs() + n(r) <= 1.0 && n(c[1]).abs() + n(r) <= 1.0;
        let ok = match *shape {
            Shape::Disk { center, radius, eps } => radius > 0.0 && eps > 0.0 && fits(center, radius),
            Shape::Annulus { center, inner, outer, eps } => {
                inner >= 0.0 && outer > inner && eps > 0.0 && fits(center, outer)
            }
            Shape::RodLattice { spacing, radius_fraction, eps, .. } => {
                spacing > 0.0 && radius_fraction > 0.0 && radius_fraction < 0.5 && eps > 0.0 && n(spacing) <= 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("scenario '{}': shape {shape:?} is invalid or leaves the domain", self.name)))
        }
    }

    /// Largest relative permittivity present.
    pub fn eps_max(&self) -> f64 {
        self.geometry
            .iter()
            .map(|s| match *s {
                Shape::Disk { eps, .. } | Shape::Annulus { eps, .. } | Shape::RodLattice { eps, .. } => eps,
            })
            .fold(1.0, f64::max)
    }

    /// Grid points per smallest wavelength.
    pub fn points_per_wavelength(&self) -> f64 {
        let h = 2.0 * self.units.length / self.discretization.n_int as f64;
        self.band.lambda_min(self.units.speed, self.eps_max()) / h
    }

    pub fn normalized(&self) -> Result<Normalized> {
        self.validate()?;
        let u = &self.units;
        let omega_min = u.omega_to_normalized(self.band.omega_min);
        let omega_max = u.omega_to_normalized(self.band.omega_max);
        let signature = make_wavelet(omega_min, omega_max, self.band.floor_db)?;
        let interval = compute_interval(omega_min, omega_max, self.discretization.mu)?;
        let point = |p: [f64; 2]| (u.length_to_normalized(p[0]), u.length_to_normalized(p[1]));
        let mut shapes = Vec::new();
        for s in &self.geometry {
            match *s {
                Shape::Disk { center, radius, eps } => {
                    let (cx, cy) = point(center);
                    shapes.push(Region::Annulus { cx, cy, r_in: 0.0, r_out: u.length_to_normalized(radius), eps });
                }
                Shape::Annulus { center, inner, outer, eps } => {
                    let (cx, cy) = point(center);
                    shapes.push(Region::Annulus {
                        cx,
                        cy,
                        r_in: u.length_to_normalized(inner),
                        r_out: u.length_to_normalized(outer),
                        eps,
                    });
                }
                Shape::RodLattice { spacing, radius_fraction, eps, removed } => {
                    let ell = u.length_to_normalized(spacing);
                    shapes.push(Region::Rods {
                        centres: rod_centres(ell, removed),
                        radius: radius_fraction * ell,
                        eps,
                    });
                }
            }
        }
        Ok(Normalized {
            signature,
            interval,
            medium: Medium { regions: shapes },
            source: point(self.source.position),
            amplitude: self.source.amplitude,
            probes: self.probes.iter().map(|&p| point(p)).collect(),
            window: u.time_to_normalized(self.window),
        })
    }
}

/// Rod centres of a square lattice with spacing `ell` whose rods fit in
/// `[-1, 1]^2`, with the defect rows removed.
pub fn rod_centres(ell: f64, removed: Removal) -> Vec<(f64, f64)> {
    let nmax = ((1.0 - 0.5 * ell) / ell).floor() as i64;
    let mut out = Vec::new();
    for i in -nmax..=nmax {
        for j in -nmax..=nmax {
            if removed == Removal::Bend && ((j == 0 && i <= 0) || (i == 0 && j >= 0)) {
                continue;
            }
            out.push((i as f64 * ell, j as f64 * ell));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Annulus { cx: f64, cy: f64, r_in: f64, r_out: f64, eps: f64 },
    Rods { centres: Vec<(f64, f64)>, radius: f64, eps: f64 },
}

/// Piecewise-constant permittivity in normalized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub regions: Vec<Region>,
}

impl Medium {
    pub fn eps(&self, x: f64, y: f64) -> f64 {
        let mut value = 1.0;
        for r in &self.regions {
            match r {
                Region::Annulus { cx, cy, r_in, r_out, eps } => {
                    let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                    if d >= *r_in && d <= *r_out {
                        value = *eps;
                    }
                }
                Region::Rods { centres, radius, eps } => {
                    if centres.iter().any(|&(a, b)| (x - a).powi(2) + (y - b).powi(2) <= radius * radius) {
                        value = *eps;
                    }
                }
            }
        }
        value
    }
}

/// A scenario in solver units.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub signature: SourceSignature,
    pub interval: SpectralInterval,
    pub medium: Medium,
    pub source: (f64, f64),
    pub amplitude: f64,
    pub probes: Vec<(f64, f64)>,
    pub window: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in ["homogeneous", "ring", "waveguide"] {
            let sc = Scenario::preset(name).unwrap();
            sc.validate().unwrap();
            assert!(sc.points_per_wavelength() >= 18.0, "{name}: {}", sc.points_per_wavelength());
        }
        assert!(Scenario::preset("nope").is_err());
    }

    #[test]
    fn homogeneous_receiver_distance() {
        let sc = Scenario::homogeneous();
        let p = sc.probes[0];
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        assert!((r / sc.band.lambda_mid(sc.units.speed) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn waveguide_lattice() {
        let sc = Scenario::waveguide();
        let norm = sc.normalized().unwrap();
        let Region::Rods { centres, radius, .. } = &norm.medium.regions[0] else { panic!() };
        assert_eq!(centres.len(), 72);
        let ell = 0.58 / 2.9;
        assert!((radius - 0.18 * ell).abs() < 1e-14);
        for &(a, b) in centres {
            assert!(a.abs() + radius <= 1.0 && b.abs() + radius <= 1.0);
        }
        assert_eq!(norm.medium.eps(ell, ell), 11.56);
        assert_eq!(norm.medium.eps(-ell, 0.0), 1.0);
        assert_eq!(norm.medium.eps(0.0, ell), 1.0);
        assert_eq!(norm.medium.eps(ell, 0.0), 11.56);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut sc = Scenario::ring();
        sc.probes = vec![[2.0 * sc.units.length, 0.0]];
        assert!(matches!(sc.validate(), Err(Error::Config(_))));
        let mut sc = Scenario::ring();
        sc.solvers.m_list = vec![10, 5];
        assert!(sc.validate().is_err());
        let mut sc = Scenario::ring();
        sc.solvers.reference = ReferenceKind::Analytic;
        assert!(sc.validate().is_err());
        assert!(Scenario::from_toml("name = 3").is_err());
        assert!(Scenario::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn toml_defaults_fill_in() {
        let sc = Scenario::from_toml("name = \"tiny\"\n[discretization]\nn_int = 40\n").unwrap();
        assert_eq!(sc.discretization.k, 9);
        assert_eq!(sc.solvers.fdtd_pml_layers, 10);
        assert_eq!(Scenario::from_toml(&sc.to_toml().unwrap()).unwrap(), sc);
    }
}
