//! Experiment drivers: build the discrete problem, run the Lanczos recursion
//! with checkpoints, evaluate traces and compare against a reference.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::report::{ComparisonReport, ConvergencePoint, RunMetadata, Timings};
use super::scenario::{Normalized, ReferenceKind, Scenario};
use crate::error::{Error, Result};
use crate::grid::{build_axis, build_grid2d, Grid2D};
use crate::lanczos::{bilanczos, extend, LanczosDecomposition, LanczosOptions};
use crate::operator::{assemble, sample_source, MediumMap, SourceVector, WaveOperator};
use crate::reference::{analytic_homogeneous, fdtd_solve, AnalyticProbe, FdtdConfig, Raster};
use crate::sctde::{impulse_step, SctdeEvaluator};
use crate::signal::{compare_probes, compare_traces, convolve_source, Waveform};
use crate::stieltjes::{to_continued_fraction, PmlSteps};
use crate::zolotarev::zolotarev_approx;

/// The discrete problem behind a scenario.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub norm: Normalized,
    pub steps: PmlSteps,
    pub grid: Grid2D,
    pub op: WaveOperator,
    pub source: SourceVector,
    pub probe_nodes: Vec<usize>,
    pub setup_seconds: f64,
}

pub fn prepare(sc: &Scenario) -> Result<Prepared> {
    let start = Instant::now();
    let norm = sc.normalized()?;
    let imp = zolotarev_approx(&norm.interval, sc.discretization.k)?;
    let steps = to_continued_fraction(&imp)?;
    let grid = build_grid2d(build_axis(sc.discretization.n_int, &steps)?);
    let medium = MediumMap::from_fn(&grid, |x, y| norm.medium.eps(x, y));
    let op = assemble(&grid, &medium)?;
    let source = sample_source(&grid, norm.source, norm.amplitude)?;
    let probe_nodes = norm.probes.iter().map(|&(x, y)| grid.nearest_node(x, y)).collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        scenario: sc.clone(),
        norm,
        steps,
        grid,
        op,
        source,
        probe_nodes,
        setup_seconds: start.elapsed().as_secs_f64(),
    })
}

impl Prepared {
    fn node_xy(&self, idx: usize) -> (f64, f64) {
        let (x, y) = self.grid.node(idx);
        (x.re, y.re)
    }

    /// Source-convolved Lanczos trace from the first `m` steps, normalized time.
    pub fn lanczos_trace(&self, dec: &LanczosDecomposition, m: usize) -> Result<Waveform> {
        let ev = SctdeEvaluator::new(dec, m)?;
        let q = &self.norm.signature;
        let dt = impulse_step(&ev, q.omega_cutoff());
        let n = (self.norm.window / dt).ceil() as usize + 1;
        convolve_source(&ev.evaluate_uniform(dt, n)?, q)
    }

    /// Reference trace in normalized time and the FDTD step count, if any.
    pub fn reference_trace(&self) -> Result<Option<(Waveform, Option<usize>)>> {
        let sc = &self.scenario;
        let q = &self.norm.signature;
        match sc.solvers.reference {
            ReferenceKind::None => Ok(None),
            ReferenceKind::Analytic => {
                if !self.norm.medium.regions.is_empty() {
                    return Err(Error::Config("the analytic reference needs an empty geometry".into()));
                }
                let src = self.node_xy(self.source.support[0]);
                let dt = std::f64::consts::PI / (2.0 * q.omega_cutoff());
                let n = (self.norm.window / dt).ceil() as usize + 1;
                let mut samples = Vec::new();
                for &p in &self.probe_nodes {
                    let (x, y) = self.node_xy(p);
                    let probe = AnalyticProbe {
                        r: ((x - src.0).powi(2) + (y - src.1).powi(2)).sqrt(),
                        speed: 1.0,
                        amplitude: self.norm.amplitude,
                        signature: *q,
                    };
                    samples.push(analytic_homogeneous(&probe, dt, n)?.samples.remove(0));
                }
                Ok(Some((Waveform::new(0.0, dt, samples)?, None)))
            }
            ReferenceKind::Fdtd => {
                let n = sc.discretization.n_int;
                let cell = 2.0 / n as f64;
                let raster = Raster::from_fn(n + 1, n + 1, -1.0, -1.0, cell, |x, y| self.norm.medium.eps(x, y));
                let cfg = FdtdConfig {
                    cell,
                    pml_layers: sc.solvers.fdtd_pml_layers,
                    courant_fraction: sc.solvers.fdtd_courant,
                    duration: self.norm.window,
                    ..Default::default()
                };
                let src = self.node_xy(self.source.support[0]);
                let probes: Vec<(f64, f64)> = self.probe_nodes.iter().map(|&p| self.node_xy(p)).collect();
                let res = fdtd_solve(&raster, src, self.norm.amplitude, q, &probes, &cfg)?;
                Ok(Some((res.waveform, Some(res.steps))))
            }
        }
    }

    pub fn lanczos_options(&self) -> LanczosOptions {
        LanczosOptions { breakdown_tol: self.scenario.solvers.breakdown_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for traces, checkpoint and report; nothing is written when unset.
    pub out_dir: Option<PathBuf>,
    /// Continue from an existing checkpoint in `out_dir`.
    pub resume: bool,
    /// Write a trace file for every evaluated `m`, not only the last.
    pub all_traces: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ComparisonReport,
    /// Trace at the largest evaluated `m`, time in seconds.
    pub lanczos: Option<Waveform>,
    pub reference: Option<Waveform>,
}

const CHECKPOINT: &str = "lanczos.ckpt";

/// Runs to the largest `m` of the scenario and evaluates the trace there.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<RunOutput> {
    let m_max = *sc.solvers.m_list.last().ok_or_else(|| Error::Config("empty m_list".into()))?;
    execute(sc, &[m_max], opts)
}

/// Errors at every `m` of `m_list` from a single recursion run to the largest.
pub fn convergence_study(sc: &Scenario, m_list: &[usize], opts: &RunOptions) -> Result<ComparisonReport> {
    if m_list.is_empty() || m_list[0] == 0 || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("m list must be positive and strictly increasing".into()));
    }
    if sc.solvers.reference == ReferenceKind::None {
        return Err(Error::Config("a convergence study needs a reference solution".into()));
    }
    Ok(execute(sc, m_list, opts)?.report)
}

fn execute(sc: &Scenario, m_list: &[usize], opts: &RunOptions) -> Result<RunOutput> {
    let prep = prepare(sc)?;
    let scale = sc.units.time_scale();
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("scenario.toml"), sc.to_toml()?)?;
    }
    let mut report = ComparisonReport {
        scenario: sc.name.clone(),
        reference: sc.solvers.reference,
        probe_errors: Vec::new(),
        error: None,
        convergence: Vec::new(),
        lanczos_iterations: 0,
        reference_steps: None,
        timings: Timings { setup: prep.setup_seconds, ..Default::default() },
        metadata: RunMetadata::new(sc, prep.op.n, prep.norm.interval.chi),
        failure: None,
    };

    let t = Instant::now();
    let reference = prep.reference_trace()?;
    report.timings.reference = t.elapsed().as_secs_f64();
    if let Some((_, steps)) = &reference {
        report.reference_steps = *steps;
    }
    if let (Some(dir), Some((w, _))) = (&opts.out_dir, &reference) {
        write_trace(&dir.join("reference.csv"), &w.rescaled_time(scale))?;
    }

    let t = Instant::now();
    let m_max = *m_list.last().unwrap();
    let (dec, failure) = recurse(&prep, m_max, opts);
    report.timings.lanczos = t.elapsed().as_secs_f64();
    let dec = match dec {
        Ok(d) => d,
        Err(e) => {
            report.failure = Some(e.to_string());
            if let Some(dir) = &opts.out_dir {
                report.write_json(&dir.join("report.json"))?;
            }
            return Err(e);
        }
    };
    report.lanczos_iterations = dec.m();

    let mut last = None;
    for &m in m_list.iter().filter(|&&m| m <= dec.m()) {
        let t = Instant::now();
        let trace = prep.lanczos_trace(&dec, m)?;
        let (error, probe_errors) = match &reference {
            Some((r, _)) => (Some(compare_traces(&trace, r)?), compare_probes(&trace, r)?),
            None => (None, Vec::new()),
        };
        let eval_seconds = t.elapsed().as_secs_f64();
        report.timings.evaluation += eval_seconds;
        report.convergence.push(ConvergencePoint { m, error, probe_errors: probe_errors.clone(), eval_seconds });
        report.error = error;
        report.probe_errors = probe_errors;
        let physical = trace.rescaled_time(scale);
        if let Some(dir) = &opts.out_dir {
            if opts.all_traces {
                write_trace(&dir.join(format!("lanczos_m{m}.csv")), &physical)?;
            }
        }
        last = Some(physical);
    }
    if let Some(dir) = &opts.out_dir {
        if let Some(w) = &last {
            write_trace(&dir.join("lanczos.csv"), w)?;
        }
    }
    report.failure = failure.as_ref().map(|e| e.to_string());
    if let Some(dir) = &opts.out_dir {
        report.write_json(&dir.join("report.json"))?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RunOutput { report, lanczos: last, reference: reference.map(|(w, _)| w.rescaled_time(scale)) })
}

/// Runs or resumes the recursion in checkpointed chunks. A breakdown keeps
/// the steps computed so far and is returned alongside them.
fn recurse(prep: &Prepared, m_max: usize, opts: &RunOptions) -> (Result<LanczosDecomposition>, Option<Error>) {
    let lopts = prep.lanczos_options();
    let every = prep.scenario.solvers.checkpoint_every;
    let ckpt = opts.out_dir.as_ref().map(|d| d.join(CHECKPOINT));
    let mut dec = match resume_from(prep, ckpt.as_deref(), opts.resume) {
        Ok(Some(d)) => d,
        Ok(None) => match bilanczos(&prep.op, &prep.source.values, m_max.min(every), &prep.probe_nodes, &lopts) {
            Ok(d) => d,
            Err(e) => return (Err(e), None),
        },
        Err(e) => return (Err(e), None),
    };
    let save = |d: &LanczosDecomposition| -> Result<()> {
        if let Some(path) = &ckpt {
            d.save(BufWriter::new(File::create(path)?))?;
        }
        Ok(())
    };
    while dec.m() < m_max {
        let target = (dec.m() + every).min(m_max);
        if let Err(e) = extend(&prep.op, &mut dec, target, &lopts) {
            if let Err(io) = save(&dec) {
                return (Err(io), None);
            }
            return (Ok(dec), Some(e));
        }
        if let Err(e) = save(&dec) {
            return (Err(e), None);
        }
    }
    if let Err(e) = save(&dec) {
        return (Err(e), None);
    }
    (Ok(dec), None)
}

fn resume_from(prep: &Prepared, path: Option<&Path>, resume: bool) -> Result<Option<LanczosDecomposition>> {
    let Some(path) = path.filter(|p| resume && p.exists()) else {
        return Ok(None);
    };
    let dec = LanczosDecomposition::load(BufReader::new(File::open(path)?))?;
    if dec.n != prep.op.n || dec.probes != prep.probe_nodes || dec.tail.is_none() {
        return Err(Error::Checkpoint(format!("{} does not match this scenario", path.display())));
    }
    Ok(Some(dec))
}

fn write_trace(path: &Path, w: &Waveform) -> Result<()> {
    w.write_csv(BufWriter::new(File::create(path)?))
}
