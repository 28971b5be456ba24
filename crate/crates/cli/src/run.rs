//! Running a configured study and writing its outputs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use helmuc::analysis::{run_convergence_study, ConvergenceReport, ProblemKind, Quantity};
use thiserror::Error;

use crate::config::ExperimentConfig;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HELMUC_THREADS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Solver(#[from] helmuc::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid {THREADS_ENV}='{0}': expected a positive integer")]
    Threads(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: ConvergenceReport,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub summary: String,
}

/// Reads the worker cap from the environment; `None` when unset.
pub fn thread_cap() -> Result<Option<usize>, RunError> {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(RunError::Threads(raw)),
        },
        Err(_) => Ok(None),
    }
}

/// Runs the study and writes the CSV and the summary next to it.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let study = config.study();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    let report = pool.install(|| run_convergence_study(&study))?;

    let csv_path = config.out.clone();
    write_atomic(&csv_path, report.to_csv().as_bytes())?;
    let summary = summarize(config, &report);
    let summary_path = summary_path(&csv_path);
    write_atomic(&summary_path, summary.as_bytes())?;
    Ok(RunOutcome {
        report,
        csv_path,
        summary_path,
        summary,
    })
}

/// `results/run.csv` becomes `results/run.summary.txt`.
pub fn summary_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    csv.with_file_name(format!("{stem}.summary.txt"))
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let err = |source| RunError::Write {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_owned(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(err)?;
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(err)
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a (fewer than 3 levels)".into(), |r| format!("{r:.3}"))
}

pub fn summarize(config: &ExperimentConfig, report: &ConvergenceReport) -> String {
    let mut s = String::new();
    let problem = match config.problem {
        ProblemKind::Hadamard { n } => format!("hadamard (n = {n})"),
        p => p.name().to_owned(),
    };
    let _ = writeln!(s, "problem      {problem}");
    let _ = writeln!(s, "geometry     {}", config.geometry);
    let _ = writeln!(s, "k            {}", config.k);
    let _ = writeln!(s, "gamma        {:e}", config.gamma);
    let _ = writeln!(s, "perturbation {:?} (seed {})", config.perturbation, config.seed);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:>6} {:>11} {:>9} {:>11} {:>11} {:>11} {:>11}",
        "n", "h", "unknowns", "rel_l2_B", "rel_h1_B", "J/h", "z_W"
    );
    for l in &report.levels {
        let _ = writeln!(
            s,
            "{:>6} {:>11.4e} {:>9} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}",
            l.n, l.h, l.n_unknowns, l.rel_l2_b, l.rel_h1_b, l.jump_over_h, l.z_norm
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "fitted rates (slope of log error against log h)");
    let _ = writeln!(s, "  rel H1 error on B   {}", fmt_rate(report.rate(Quantity::RelH1B)));
    let _ = writeln!(s, "  rel L2 error on B   {}", fmt_rate(report.rate(Quantity::RelL2B)));
    let _ = writeln!(s, "  jump seminorm / h   {}", fmt_rate(report.rate(Quantity::JumpOverH)));
    let _ = writeln!(s, "  dual norm of z      {}", fmt_rate(report.rate(Quantity::ZNorm)));
    if config.problem == ProblemKind::Wkb {
        if let Some(l) = report.finest() {
            let _ = writeln!(s);
            let _ = writeln!(s, "data q = 0 on omega: the exact solution is invisible to the measurements");
            let _ = writeln!(s, "  ||u||_L2(B)   {:.6e}", l.exact_l2_b);
            let _ = writeln!(s, "  ||u_h||_L2(B) {:.6e}", l.uh_l2_b);
            let _ = writeln!(s, "  ratio         {:.6e}", l.uh_l2_b / l.exact_l2_b);
        }
    }
    s
}
