//! Experiment configuration from command-line flags and `key = value` files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use helmuc::analysis::{ProblemKind, StudyConfig};
use helmuc::solver::DEFAULT_GAMMA;
use helmuc::{Geometry, PerturbationLaw};
use thiserror::Error;

pub const DEFAULT_LEVELS: [usize; 4] = [16, 32, 64, 128];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("invalid value '{value}' for '{key}': {reason}")]
    Value {
        key: &'static str,
        value: String,
        reason: String,
    },
    #[error("missing required setting '{0}'")]
    Missing(&'static str),
    #[error("problem '{problem}' cannot run on geometry '{geometry}': {reason}")]
    Incompatible {
        problem: &'static str,
        geometry: Geometry,
        reason: &'static str,
    },
}

/// Raw settings as given on the command line; every field is optional so that
/// a config file can supply it.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "helmuc", version, about = "Convergence studies for stabilized Helmholtz unique continuation")]
pub struct Flags {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// gaussian | hadamard | wkb
    #[arg(long)]
    pub problem: Option<String>,
    /// convex | nonconvex_box | nonconvex_disk | hadamard_convex | hadamard_nonconvex | wkb
    #[arg(long)]
    pub geometry: Option<String>,
    /// Wavenumber.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Hadamard frequency.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Stabilization parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Comma-separated cells per unit length, e.g. `16,32,64,128`.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
    /// none | h | h2
    #[arg(long)]
    pub perturb: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<String>,
}

const KEYS: [&str; 9] = [
    "problem", "geometry", "k", "n", "gamma", "levels", "perturb", "seed", "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub geometry: Geometry,
    pub k: f64,
    pub gamma: f64,
    pub levels: Vec<usize>,
    pub perturbation: PerturbationLaw,
    pub seed: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn study(&self) -> StudyConfig {
        StudyConfig {
            gamma: self.gamma,
            levels: self.levels.clone(),
            perturbation: self.perturbation,
            seed: self.seed,
            parallel_levels: true,
            ..StudyConfig::new(self.problem, self.geometry, self.k)
        }
    }
}

/// Reads a `key = value` file. Blank lines and `#` comments are ignored.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_key_values(&text, path)
}

fn parse_key_values(text: &str, path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: path.to_owned(),
            line: i + 1,
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_owned()));
        }
        map.insert(key.to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

fn invalid(key: &'static str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Value {
        key,
        value: value.to_owned(),
        reason: reason.to_string(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| invalid(key, value, e))
}

/// Merges flags over file entries, applies defaults and validates.
pub fn parse_config(flags: &Flags) -> Result<ExperimentConfig, ConfigError> {
    let mut settings = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let overrides = [
        ("problem", &flags.problem),
        ("geometry", &flags.geometry),
        ("k", &flags.k),
        ("n", &flags.n),
        ("gamma", &flags.gamma),
        ("levels", &flags.levels),
        ("perturb", &flags.perturb),
        ("seed", &flags.seed),
        ("out", &flags.out),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            settings.insert(key.to_owned(), v.clone());
        }
    }
    from_settings(&settings)
}

fn from_settings(s: &BTreeMap<String, String>) -> Result<ExperimentConfig, ConfigError> {
    let get = |key: &'static str| s.get(key).map(String::as_str);

    let geometry_name = get("geometry").ok_or(ConfigError::Missing("geometry"))?;
    let geometry: Geometry = geometry_name
        .parse()
        .map_err(|_| invalid("geometry", geometry_name, "unknown geometry"))?;

    let k_raw = get("k").ok_or(ConfigError::Missing("k"))?;
    let k: f64 = parse_num("k", k_raw)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(invalid("k", k_raw, "must be finite and nonnegative"));
    }

    let problem_name = get("problem").ok_or(ConfigError::Missing("problem"))?;
    let problem = match problem_name {
        "gaussian" => ProblemKind::Gaussian,
        "hadamard" => {
            let n_raw = get("n").ok_or(ConfigError::Missing("n"))?;
            let n: u32 = parse_num("n", n_raw)?;
            if n == 0 {
                return Err(invalid("n", n_raw, "must be at least 1"));
            }
            ProblemKind::Hadamard { n }
        }
        "wkb" => {
            if k <= 0.0 {
                return Err(invalid("k", k_raw, "the wkb problem needs k > 0"));
            }
            ProblemKind::Wkb
        }
        other => return Err(invalid("problem", other, "expected gaussian, hadamard or wkb")),
    };
    check_compatible(problem, geometry)?;

    let gamma = match get("gamma") {
        Some(raw) => {
            let g: f64 = parse_num("gamma", raw)?;
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid("gamma", raw, "must be positive"));
            }
            g
        }
        None => DEFAULT_GAMMA,
    };

    let levels = match get("levels") {
        Some(raw) => {
            let levels = raw
                .split(',')
                .map(|t| parse_num::<usize>("levels", t.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            if levels.is_empty() || levels.contains(&0) {
                return Err(invalid("levels", raw, "need positive cell counts"));
            }
            if levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("levels", raw, "must be strictly increasing"));
            }
            levels
        }
        None => DEFAULT_LEVELS.to_vec(),
    };

    let perturbation = match get("perturb").unwrap_or("none") {
        "none" => PerturbationLaw::None,
        "h" => PerturbationLaw::OrderH,
        "h2" => PerturbationLaw::OrderH2,
        other => return Err(invalid("perturb", other, "expected none, h or h2")),
    };

    let seed = match get("seed") {
        Some(raw) => parse_num("seed", raw)?,
        None => 0,
    };

    let out = match get("out") {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        Some(p) => return Err(invalid("out", p, "empty path")),
        None => PathBuf::from(format!("{}_{}_k{}.csv", problem.name(), geometry, k)),
    };

    Ok(ExperimentConfig {
        problem,
        geometry,
        k,
        gamma,
        levels,
        perturbation,
        seed,
        out,
    })
}

fn check_compatible(problem: ProblemKind, geometry: Geometry) -> Result<(), ConfigError> {
    let ok = match problem {
        ProblemKind::Gaussian => matches!(
            geometry,
            Geometry::Convex | Geometry::NonconvexBox | Geometry::NonconvexDisk
        ),
        ProblemKind::Hadamard { .. } => {
            matches!(geometry, Geometry::HadamardConvex | Geometry::HadamardNonconvex)
        }
        ProblemKind::Wkb => geometry == Geometry::Wkb,
    };
    if ok {
        return Ok(());
    }
    let reason = match problem {
        ProblemKind::Gaussian => "the Gaussian case lives on the unit square",
        ProblemKind::Hadamard { .. } => "the Hadamard case lives on (0, pi) x (0, 1)",
        ProblemKind::Wkb => "the WKB case needs its own data strip",
    };
    Err(ConfigError::Incompatible {
        problem: problem.name(),
        geometry,
        reason,
    })
}
