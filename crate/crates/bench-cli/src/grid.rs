//! The benchmark grid: datasets x settings x repeats, each cell running
//! every configured algorithm on its own test split.

use std::collections::BTreeSet;

use rayon::prelude::*;

use anomaly_bench::corrupt::{add_irrelevant_features, duplicate_anomalies, flip_labels, SplitDataset};
use anomaly_bench::eval::{aucpr, aucroc, measure_timing, stratified_split, subsample_labels, MetricRecord};
use anomaly_bench::seed::derive_seed;
use anomaly_bench::synth::{assemble_synthetic, SynthParams};
use anomaly_bench::{Dataset, LabelMask};

use crate::config::{Algorithm, BenchmarkConfig, Setting};
use crate::error::{CliError, CliResult};
use crate::io::load_csv;
use crate::prep::prep_dataset;

const STAGE_PREP: u64 = 0;
const STAGE_SPLIT: u64 = 1;
const STAGE_SETTING: u64 = 2;
const STAGE_FIT: u64 = 3;

/// Placeholder algorithm id for failures that precede any algorithm.
pub const ALL_ALGORITHMS: &str = "*";

/// FNV-1a, so seeds depend on names rather than on configuration order.
pub fn stable_id(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellKey {
    pub dataset: String,
    pub algorithm: String,
    pub setting: String,
    pub repeat: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCell {
    pub key: CellKey,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub key: CellKey,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    pub records: Vec<MetricRecord>,
    pub skipped: Vec<SkippedCell>,
    pub errors: Vec<ErrorRow>,
}

fn record_key(r: &MetricRecord) -> (&str, &str, &str, usize) {
    (&r.dataset, &r.algorithm, &r.setting, r.repeat)
}

impl ResultsTable {
    /// Sorts every part by (dataset, algorithm, setting, repeat).
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| record_key(a).cmp(&record_key(b)));
        self.skipped.sort_by(|a, b| a.key.cmp(&b.key));
        self.errors.sort_by(|a, b| a.key.cmp(&b.key));
    }

    pub fn settings(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.setting.as_str()).collect()
    }

    pub fn records_for(&self, setting: &str) -> Vec<MetricRecord> {
        self.records.iter().filter(|r| r.setting == setting).cloned().collect()
    }
}

#[derive(Debug, Default)]
struct CellOutcome {
    records: Vec<MetricRecord>,
    skipped: Vec<SkippedCell>,
    errors: Vec<ErrorRow>,
}

struct Cell<'a> {
    dataset: &'a str,
    data: &'a Dataset,
    setting: Setting,
    repeat: usize,
}

impl Cell<'_> {
    fn key(&self, algorithm: &str) -> CellKey {
        CellKey {
            dataset: self.dataset.to_string(),
            algorithm: algorithm.to_string(),
            setting: self.setting.id(),
            repeat: self.repeat,
        }
    }

    /// Split and setting applied; the mask is `None` when the setting has no labels.
    fn prepare(&self, cfg: &BenchmarkConfig) -> anomaly_bench::Result<(SplitDataset, Option<LabelMask>)> {
        let d = stable_id(self.dataset);
        let r = self.repeat as u64;
        let setting_seed = derive_seed(cfg.seed, &[d, stable_id(&self.setting.id()), r, STAGE_SETTING]);
        let split_seed = derive_seed(cfg.seed, &[d, r, STAGE_SPLIT]);
        let generated;
        let base = match self.setting {
            Setting::Synthetic(t) => {
                generated = assemble_synthetic(self.data, &SynthParams::new(t, setting_seed))?;
                &generated
            }
            _ => self.data,
        };
        let split = stratified_split(base, cfg.train_frac, split_seed)?;
        let full = |s: SplitDataset| {
            let m = LabelMask::all_anomalies(&s.train.y);
            (s, Some(m))
        };
        Ok(match self.setting {
            Setting::Clean | Setting::Synthetic(_) => (split, None),
            Setting::Supervision(g) => {
                let m = subsample_labels(&split.train.y, g, setting_seed)?;
                (split, Some(m))
            }
            Setting::Duplication(f) => full(duplicate_anomalies(&split, f, setting_seed)?),
            Setting::Noise(ratio) => full(add_irrelevant_features(&split, ratio, setting_seed)?),
            Setting::Flip(ratio) => full(flip_labels(&split, ratio, setting_seed)?),
        })
    }

    fn run(&self, cfg: &BenchmarkConfig) -> CellOutcome {
        let mut out = CellOutcome::default();
        let (split, mask) = match self.prepare(cfg) {
            Ok(v) => v,
            Err(e) => {
                out.errors.push(ErrorRow {
                    key: self.key(ALL_ALGORITHMS),
                    error: e.name().into(),
                    message: e.to_string(),
                });
                return out;
            }
        };
        for alg in &cfg.algorithms {
            if alg.spec.needs_labels() && mask.is_none() {
                out.skipped.push(SkippedCell {
                    key: self.key(&alg.id),
                    reason: "setting provides no labels".into(),
                });
                continue;
            }
            match self.run_algorithm(cfg, alg, &split, mask.as_ref()) {
                Ok(rec) => out.records.push(rec),
                Err(e) => out.errors.push(ErrorRow {
                    key: self.key(&alg.id),
                    error: e.name().into(),
                    message: e.to_string(),
                }),
            }
        }
        out
    }

    fn run_algorithm(
        &self,
        cfg: &BenchmarkConfig,
        alg: &Algorithm,
        split: &SplitDataset,
        mask: Option<&LabelMask>,
    ) -> anomaly_bench::Result<MetricRecord> {
        let seed = derive_seed(
            cfg.seed,
            &[
                stable_id(self.dataset),
                self.repeat as u64,
                STAGE_FIT,
                stable_id(&alg.id),
            ],
        );
        let mask = if alg.spec.needs_labels() { mask } else { None };
        let (scores, fit_ms, score_ms) =
            measure_timing(|| alg.spec.fit(&split.train.x, mask, seed), |m| m.score(&split.test.x))?;
        let (fit_ms, score_ms) = if cfg.record_timings {
            (fit_ms, score_ms)
        } else {
            (0.0, 0.0)
        };
        Ok(MetricRecord {
            dataset: self.dataset.to_string(),
            algorithm: alg.id.clone(),
            setting: self.setting.id(),
            repeat: self.repeat,
            aucroc: aucroc(&scores, &split.test.y)?,
            aucpr: aucpr(&scores, &split.test.y)?,
            fit_ms,
            score_ms,
        })
    }
}

/// Dataset id from a file path: its stem.
pub fn dataset_id(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Loads and preps every configured dataset.
pub fn load_datasets(cfg: &BenchmarkConfig) -> CliResult<Vec<(String, Dataset)>> {
    let mut ids = BTreeSet::new();
    let mut out = Vec::new();
    for p in &cfg.datasets {
        let id = dataset_id(p);
        if !ids.insert(id.clone()) {
            return Err(CliError::Usage(format!("two datasets share the id `{id}`")));
        }
        out.push((id, load_csv(p)?.data));
    }
    Ok(out)
}

/// Runs the grid on already loaded datasets; each is prepped once.
pub fn run_grid_on(cfg: &BenchmarkConfig, datasets: &[(String, Dataset)], threads: usize) -> CliResult<ResultsTable> {
    let prepped = datasets
        .iter()
        .map(|(id, ds)| {
            Ok((
                id.clone(),
                prep_dataset(ds, derive_seed(cfg.seed, &[stable_id(id), STAGE_PREP]))?,
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut cells = Vec::new();
    for (id, ds) in &prepped {
        for &setting in &cfg.settings {
            for repeat in 0..cfg.n_repeats {
                cells.push(Cell {
                    dataset: id,
                    data: ds,
                    setting,
                    repeat,
                });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let outcomes: Vec<CellOutcome> = pool.install(|| cells.par_iter().map(|c| c.run(cfg)).collect());
    let mut table = ResultsTable::default();
    for o in outcomes {
        table.records.extend(o.records);
        table.skipped.extend(o.skipped);
        table.errors.extend(o.errors);
    }
    table.sort();
    Ok(table)
}

pub fn run_grid(cfg: &BenchmarkConfig, threads: usize) -> CliResult<ResultsTable> {
    run_grid_on(cfg, &load_datasets(cfg)?, threads)
}
