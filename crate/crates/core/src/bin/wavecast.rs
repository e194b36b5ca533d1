use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use wavecast::harness::{convergence_study, prepare, run_scenario, RunOptions, Scenario};
use wavecast::signal::{compare_traces, Waveform};
use wavecast::stieltjes::to_continued_fraction;
use wavecast::zolotarev::{
    compute_interval, error_curve, impedance_error, predicted_error, zolotarev_approx, SpectralInterval,
};
use wavecast::{Error, Result};

/// Transient 2D wave fields from Krylov reduced models with Zolotarev PMLs.
///
/// Scenario arguments are TOML files or `preset:homogeneous`,
/// `preset:ring`, `preset:waveguide`.
#[derive(Parser)]
#[command(name = "wavecast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to its largest m and write traces and a report.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "wavecast-out")]
        out: PathBuf,
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
        /// Exit with status 4 if the error against the reference exceeds this.
        #[arg(long)]
        assert: Option<f64>,
    },
    /// Error against the reference for each m in a list.
    Converge {
        scenario: PathBuf,
        /// Comma-separated increasing step counts; defaults to the scenario's list.
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, default_value = "wavecast-out")]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        assert: Option<f64>,
    },
    /// Zolotarev impedance fit and PML steps for a band or a normalized interval.
    PmlReport {
        /// Normalized interval ratio; overrides the band options.
        #[arg(long)]
        chi: Option<f64>,
        #[arg(long, default_value_t = 2.42e14)]
        omega_min: f64,
        #[arg(long, default_value_t = 2.18e15)]
        omega_max: f64,
        #[arg(long, default_value_t = 0.1)]
        mu: f64,
        /// Degrees to report, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "9")]
        k: Vec<usize>,
        #[arg(long, default_value = "pml-report")]
        out: PathBuf,
    },
    /// Relative L2 difference of two trace files (the second is the reference).
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        assert: Option<f64>,
    },
    /// Write the grid nodes of a scenario as CSV.
    GridDump {
        scenario: PathBuf,
        #[arg(long, default_value = "grid.csv")]
        out: PathBuf,
    },
    /// Write the operator and mass of a scenario in Matrix Market format.
    OperatorDump {
        scenario: PathBuf,
        #[arg(long, default_value = "operator.mtx")]
        out: PathBuf,
    },
    /// Print a preset scenario as TOML.
    Preset { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavecast: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn check(error: Option<f64>, tol: Option<f64>) -> Result<()> {
    match (error, tol) {
        (Some(e), Some(t)) if e.is_nan() || e > t => {
            Err(Error::Validation(format!("error {e:.4e} exceeds tolerance {t:.4e}")))
        }
        (None, Some(_)) => Err(Error::Validation("no reference error available to check".into())),
        _ => Ok(()),
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { scenario, out, resume, assert } => {
            let sc = Scenario::load(&scenario)?;
            let opts = RunOptions { out_dir: Some(out.clone()), resume, all_traces: false };
            let res = run_scenario(&sc, &opts)?;
            print!("{}", res.report.summary());
            println!("artifacts in {}", out.display());
            check(res.report.error, assert)
        }
        Command::Converge { scenario, m, out, resume, assert } => {
            let sc = Scenario::load(&scenario)?;
            let m_list = if m.is_empty() { sc.solvers.m_list.clone() } else { m };
            let opts = RunOptions { out_dir: Some(out.clone()), resume, all_traces: true };
            let report = convergence_study(&sc, &m_list, &opts)?;
            print!("{}", report.summary());
            println!("artifacts in {}", out.display());
            check(report.error, assert)
        }
        Command::PmlReport { chi, omega_min, omega_max, mu, k, out } => {
            pml_report(chi, omega_min, omega_max, mu, &k, &out)
        }
        Command::Compare { a, b, assert } => {
            let wa = read_trace(&a)?;
            let wb = read_trace(&b)?;
            let e = compare_traces(&wa, &wb)?;
            println!("{e:.6e}");
            check(Some(e), assert)
        }
        Command::GridDump { scenario, out } => {
            let prep = prepare(&Scenario::load(&scenario)?)?;
            prep.grid.write_csv(BufWriter::new(File::create(&out)?))?;
            println!("{} unknowns written to {}", prep.grid.unknown_count(), out.display());
            Ok(())
        }
        Command::OperatorDump { scenario, out } => {
            let prep = prepare(&Scenario::load(&scenario)?)?;
            prep.op.write_matrix_market(BufWriter::new(File::create(&out)?))?;
            println!("N = {}, nnz = {} written to {}", prep.op.n, prep.op.nnz(), out.display());
            Ok(())
        }
        Command::Preset { name } => {
            print!("{}", Scenario::preset(&name)?.to_toml()?);
            Ok(())
        }
    }
}

fn read_trace(path: &Path) -> Result<Waveform> {
    let f = File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Waveform::read_csv(BufReader::new(f))
}

#[derive(Serialize)]
struct PmlEntry {
    k: usize,
    max_error: f64,
    predicted: f64,
    poles: Vec<f64>,
    residues: Vec<f64>,
    gamma: Vec<f64>,
    gamma_hat: Vec<f64>,
}

#[derive(Serialize)]
struct PmlSummary {
    s_min: f64,
    s_max: f64,
    chi: f64,
    entries: Vec<PmlEntry>,
}

fn pml_report(chi: Option<f64>, omega_min: f64, omega_max: f64, mu: f64, ks: &[usize], out: &Path) -> Result<()> {
    let interval = match chi {
        Some(c) => SpectralInterval::normalized(c)?,
        None => compute_interval(omega_min, omega_max, mu)?,
    };
    std::fs::create_dir_all(out)?;
    let mut entries = Vec::new();
    for &k in ks {
        let imp = zolotarev_approx(&interval, k)?;
        let steps = to_continued_fraction(&imp)?;
        let max_error = impedance_error(&imp, &interval, 4000)?;
        let mut csv = BufWriter::new(File::create(out.join(format!("error_k{k}.csv")))?);
        writeln!(csv, "x,relative_error")?;
        for (x, e) in error_curve(&imp, &interval, 2000, 1.0) {
            writeln!(csv, "{x:.16e},{e:.16e}")?;
        }
        println!(
            "k = {k:>2}  max relative error {max_error:.4e}  (asymptotic {:.4e})",
            predicted_error(interval.chi, k)
        );
        entries.push(PmlEntry {
            k,
            max_error,
            predicted: predicted_error(interval.chi, k),
            poles: imp.poles.clone(),
            residues: imp.residues.clone(),
            gamma: steps.gamma.clone(),
            gamma_hat: steps.gamma_hat.clone(),
        });
    }
    let summary = PmlSummary { s_min: interval.s_min, s_max: interval.s_max, chi: interval.chi, entries };
    std::fs::write(out.join("pml.json"), serde_json::to_string_pretty(&summary)?)?;
    println!("chi = {:.4e}; report in {}", interval.chi, out.display());
    Ok(())
}
