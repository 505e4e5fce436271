//! Benchmark configuration loaded from a TOML file. Unknown keys are errors.
//!
//! ```toml
//! datasets = ["data/cardio.csv"]
//! algorithms = ["knn", { name = "lof", params = { k = 10 } }]
//! supervision = [0.1, 1.0]
//! anomaly_types = ["local", "global"]
//! duplication = [1, 6]
//! noise = [0.0, 0.5]
//! flip = [0.1]
//! n_repeats = 3
//! seed = 42
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use anomaly_bench::corrupt::{MAX_DUPLICATION, MAX_FLIP_RATIO, MAX_NOISE_RATIO};
use anomaly_bench::synth::AnomalyType;
use anomaly_bench::{DetectorKind, DetectorSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawAlgorithm {
    Name(String),
    Spec(RawAlgorithmSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgorithmSpec {
    name: String,
    id: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    roster: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    datasets: Vec<PathBuf>,
    algorithms: Vec<RawAlgorithm>,
    #[serde(default = "yes")]
    clean: bool,
    #[serde(default)]
    supervision: Vec<f64>,
    #[serde(default)]
    anomaly_types: Vec<String>,
    #[serde(default)]
    duplication: Vec<usize>,
    #[serde(default)]
    noise: Vec<f64>,
    #[serde(default)]
    flip: Vec<f64>,
    #[serde(default = "default_repeats")]
    n_repeats: usize,
    #[serde(default = "default_train_frac")]
    train_frac: f64,
    #[serde(default)]
    seed: u64,
    threads: Option<usize>,
    output: Option<PathBuf>,
    #[serde(default = "yes")]
    record_timings: bool,
}

fn yes() -> bool {
    true
}

fn default_repeats() -> usize {
    3
}

fn default_train_frac() -> f64 {
    anomaly_bench::eval::TRAIN_FRACTION
}

/// One value on one experimental axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    /// Original data, no labels.
    Clean,
    /// A fraction of training anomalies revealed.
    Supervision(f64),
    /// The dataset replaced by generated normals and anomalies of one type.
    Synthetic(AnomalyType),
    /// Anomalies repeated this many times in both splits.
    Duplication(usize),
    /// Irrelevant features appended at this ratio.
    Noise(f64),
    /// Training labels flipped at this ratio.
    Flip(f64),
}

impl Setting {
    pub fn id(&self) -> String {
        match self {
            Setting::Clean => "clean".into(),
            Setting::Supervision(g) => format!("gamma={g}"),
            Setting::Synthetic(t) => t.name().into(),
            Setting::Duplication(f) => format!("dup={f}"),
            Setting::Noise(r) => format!("noise={r}"),
            Setting::Flip(r) => format!("flip={r}"),
        }
    }

    /// Whether the setting provides labels for label-informed detectors.
    pub fn has_labels(&self) -> bool {
        !matches!(self, Setting::Clean | Setting::Synthetic(_))
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Algorithm {
    pub id: String,
    pub spec: DetectorSpec,
}

impl Algorithm {
    pub fn new(spec: DetectorSpec) -> Self {
        Self {
            id: spec.name().to_string(),
            spec,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub datasets: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub settings: Vec<Setting>,
    pub n_repeats: usize,
    pub train_frac: f64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output: PathBuf,
    /// When false, timings are written as 0 so outputs are byte-stable.
    pub record_timings: bool,
}

impl BenchmarkConfig {
    /// In-memory config over the given algorithms and settings.
    pub fn new(algorithms: Vec<Algorithm>, settings: Vec<Setting>) -> Self {
        Self {
            datasets: Vec::new(),
            algorithms,
            settings,
            n_repeats: 3,
            train_frac: default_train_frac(),
            seed: 0,
            threads: None,
            output: PathBuf::from("results"),
            record_timings: true,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|msg| CliError::Config {
            path: path.to_path_buf(),
            msg,
        })
    }

    /// Parses TOML; relative dataset and output paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let algorithms = raw
            .algorithms
            .iter()
            .map(parse_algorithm)
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = BTreeSet::new();
        for a in &algorithms {
            if !seen.insert(a.id.clone()) {
                return Err(format!("duplicate algorithm id `{}`", a.id));
            }
        }
        let mut settings = Vec::new();
        if raw.clean {
            settings.push(Setting::Clean);
        }
        for &g in &raw.supervision {
            if !(g > 0.0 && g <= 1.0) {
                return Err(format!("supervision ratio {g} outside (0, 1]"));
            }
            settings.push(Setting::Supervision(g));
        }
        for t in &raw.anomaly_types {
            settings.push(Setting::Synthetic(
                t.parse().map_err(|e: anomaly_bench::Error| e.to_string())?,
            ));
        }
        for &f in &raw.duplication {
            if !(1..=MAX_DUPLICATION).contains(&f) {
                return Err(format!("duplication factor {f} outside 1..={MAX_DUPLICATION}"));
            }
            settings.push(Setting::Duplication(f));
        }
        for &r in &raw.noise {
            if !(0.0..=MAX_NOISE_RATIO).contains(&r) {
                return Err(format!("noise ratio {r} outside [0, {MAX_NOISE_RATIO}]"));
            }
            settings.push(Setting::Noise(r));
        }
        for &r in &raw.flip {
            if !(0.0..=MAX_FLIP_RATIO).contains(&r) {
                return Err(format!("flip ratio {r} outside [0, {MAX_FLIP_RATIO}]"));
            }
            settings.push(Setting::Flip(r));
        }
        let mut ids = BTreeSet::new();
        for s in &settings {
            if !ids.insert(s.id()) {
                return Err(format!("duplicate setting `{s}`"));
            }
        }
        if settings.is_empty() {
            return Err("no settings configured".into());
        }
        if raw.n_repeats == 0 {
            return Err("n_repeats must be >= 1".into());
        }
        if !(raw.train_frac > 0.0 && raw.train_frac < 1.0) {
            return Err(format!("train_frac {} outside (0, 1)", raw.train_frac));
        }
        if raw.threads == Some(0) {
            return Err("threads must be >= 1".into());
        }
        Ok(Self {
            datasets: raw.datasets.iter().map(|p| base.join(p)).collect(),
            algorithms,
            settings,
            n_repeats: raw.n_repeats,
            train_frac: raw.train_frac,
            seed: raw.seed,
            threads: raw.threads,
            output: base.join(raw.output.unwrap_or_else(|| PathBuf::from("results"))),
            record_timings: raw.record_timings,
        })
    }
}

fn parse_algorithm(raw: &RawAlgorithm) -> Result<Algorithm, String> {
    match raw {
        RawAlgorithm::Name(n) => Ok(Algorithm::new(DetectorSpec::named(n).map_err(|e| e.to_string())?)),
        RawAlgorithm::Spec(s) => {
            let kind: DetectorKind = s.name.parse().map_err(|e: anomaly_bench::Error| e.to_string())?;
            let spec = match (&s.roster, kind) {
                (Some(roster), DetectorKind::ScoreStack) => {
                    let members = roster
                        .iter()
                        .map(|n| DetectorSpec::named(n))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    DetectorSpec::scorestack(members, &s.params)
                }
                (Some(_), _) => return Err(format!("`roster` only applies to scorestack, not `{kind}`")),
                (None, _) => DetectorSpec::new(kind, &s.params),
            }
            .map_err(|e| e.to_string())?;
            Ok(Algorithm {
                id: s.id.clone().unwrap_or_else(|| kind.name().to_string()),
                spec,
            })
        }
    }
}
