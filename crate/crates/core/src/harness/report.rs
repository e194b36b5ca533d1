//! Run summaries written next to the trace files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scenario::{ReferenceKind, Scenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub m: usize,
    /// Relative L2 error over all probes; `None` without a reference.
    pub error: Option<f64>,
    pub probe_errors: Vec<f64>,
    /// Eigensolve plus trace evaluation, seconds.
    pub eval_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub setup: f64,
    pub lanczos: f64,
    pub evaluation: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub git_hash: Option<String>,
    pub version: String,
    /// Timings are for the second-order Lanczos form against a Yee-grid
    /// reference on the same machine.
    pub formulation: String,
    pub unknowns: usize,
    pub chi: f64,
    pub points_per_wavelength: f64,
    pub config: Scenario,
}

impl RunMetadata {
    pub fn new(config: &Scenario, unknowns: usize, chi: f64) -> Self {
        Self {
            git_hash: git_hash(),
            version: env!("CARGO_PKG_VERSION").into(),
            formulation: "second-order".into(),
            unknowns,
            chi,
            points_per_wavelength: config.points_per_wavelength(),
            config: config.clone(),
        }
    }
}

fn git_hash() -> Option<String> {
    let out = std::process::Command::new("git").args(["rev-parse", "HEAD"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub reference: ReferenceKind,
    /// Errors at the largest evaluated `m`.
    pub probe_errors: Vec<f64>,
    pub error: Option<f64>,
    pub convergence: Vec<ConvergencePoint>,
    pub lanczos_iterations: usize,
    /// FDTD time steps, when that reference ran.
    pub reference_steps: Option<usize>,
    pub timings: Timings,
    pub metadata: RunMetadata,
    /// Set when the run stopped early; the report then holds partial results.
    pub failure: Option<String>,
}

impl ComparisonReport {
    /// Smallest evaluated `m` whose error is at most `tol`.
    pub fn first_m_below(&self, tol: f64) -> Option<usize> {
        self.convergence.iter().find(|p| p.error.is_some_and(|e| e <= tol)).map(|p| p.m)
    }

    /// Index of the first point whose error is within the factor `1 + slack`
    /// of the error at the largest `m`: the end of the pre-convergence transient.
    pub fn transient_end(&self, slack: f64) -> Option<usize> {
        let errs: Vec<f64> = self.convergence.iter().filter_map(|p| p.error).collect();
        let last = *errs.last()?;
        errs.iter().position(|&e| e <= last * (1.0 + slack))
    }

    /// Whether the error never rises by more than the factor `1 + slack` over
    /// its running minimum once the transient is over.
    pub fn monotone_after_transient(&self, slack: f64) -> bool {
        let errs: Vec<f64> = self.convergence.iter().filter_map(|p| p.error).collect();
        let Some(start) = self.transient_end(slack) else {
            return false;
        };
        let mut best = errs[start];
        for &e in &errs[start + 1..] {
            if e > best * (1.0 + slack) {
                return false;
            }
            best = best.min(e);
        }
        true
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(Error::from)
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "scenario {} (N = {}, chi = {:.3e}, {:.1} points per wavelength)\n",
            self.scenario, self.metadata.unknowns, self.metadata.chi, self.metadata.points_per_wavelength
        );
        for p in &self.convergence {
            match p.error {
                Some(e) => s += &format!("  m = {:>6}  error = {:.3e}\n", p.m, e),
                None => s += &format!("  m = {:>6}\n", p.m),
            }
        }
        if let Some(n) = self.reference_steps {
            s += &format!("  FDTD steps {n}, Lanczos iterations {}\n", self.lanczos_iterations);
        }
        let t = &self.timings;
        s += &format!(
            "  time: setup {:.2}s, lanczos {:.2}s, evaluation {:.2}s, reference {:.2}s\n",
            t.setup, t.lanczos, t.evaluation, t.reference
        );
        if let Some(f) = &self.failure {
            s += &format!("  stopped early: {f}\n");
        }
        s
    }
}
