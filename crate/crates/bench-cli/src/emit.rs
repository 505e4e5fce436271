//! CSV outputs: `results.csv`, `summary.csv`, `skipped.csv`, `errors.csv`.

use std::collections::BTreeMap;
use std::path::Path;

use anomaly_bench::eval::{rank_matrix, Aggregation, Metric, MetricRecord, RankTable};

use crate::error::{CliError, CliResult};
use crate::grid::{CellKey, ResultsTable};

pub const RESULTS_HEADER: [&str; 8] = [
    "dataset",
    "algorithm",
    "setting",
    "repeat",
    "aucroc",
    "aucpr",
    "fit_ms",
    "score_ms",
];
pub const SUMMARY_HEADER: [&str; 10] = [
    "setting",
    "dataset",
    "algorithm",
    "n_repeats",
    "aucroc",
    "aucpr",
    "fit_ms",
    "score_ms",
    "aucroc_rank",
    "aucpr_rank",
];
pub const SKIPPED_HEADER: [&str; 5] = ["dataset", "algorithm", "setting", "repeat", "reason"];
pub const ERRORS_HEADER: [&str; 6] = ["dataset", "algorithm", "setting", "repeat", "error", "message"];

/// Dataset column value of the per-algorithm rows in `summary.csv`.
pub const ALL_DATASETS: &str = "*";

fn writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e.to_string()))
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn key_fields(k: &CellKey) -> Vec<String> {
    vec![
        k.dataset.clone(),
        k.algorithm.clone(),
        k.setting.clone(),
        k.repeat.to_string(),
    ]
}

fn fmt(v: f64) -> String {
    v.to_string()
}

pub fn write_results(path: &Path, records: &[MetricRecord]) -> CliResult<()> {
    write_rows(
        path,
        &RESULTS_HEADER,
        records.iter().map(|r| {
            vec![
                r.dataset.clone(),
                r.algorithm.clone(),
                r.setting.clone(),
                r.repeat.to_string(),
                fmt(r.aucroc),
                fmt(r.aucpr),
                fmt(r.fit_ms),
                fmt(r.score_ms),
            ]
        }),
    )
}

pub fn read_results(path: &Path) -> CliResult<Vec<MetricRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let parse_err = |line: u64, column: usize, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        msg,
    };
    let header = rdr.headers().map_err(|e| parse_err(1, 0, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != RESULTS_HEADER {
        return Err(parse_err(
            1,
            0,
            format!("expected header `{}`", RESULTS_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| parse_err(line, 0, e.to_string()))?;
        if rec.len() != RESULTS_HEADER.len() {
            return Err(parse_err(line, 0, format!("expected {} fields", RESULTS_HEADER.len())));
        }
        let num = |j: usize| -> CliResult<f64> {
            rec[j]
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("`{}` is not a number", &rec[j])))
        };
        out.push(MetricRecord {
            dataset: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            setting: rec[2].to_string(),
            repeat: rec[3]
                .parse()
                .map_err(|_| parse_err(line, 4, format!("`{}` is not a repeat index", &rec[3])))?,
            aucroc: num(4)?,
            aucpr: num(5)?,
            fit_ms: num(6)?,
            score_ms: num(7)?,
        });
    }
    Ok(out)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Rank tables for one setting, or `None` when cells are missing.
fn ranks(records: &[MetricRecord]) -> [Option<RankTable>; 2] {
    [Metric::AucRoc, Metric::AucPr].map(|m| rank_matrix(records, m, Aggregation::Mean).ok())
}

fn rank_of(t: &Option<RankTable>, dataset: Option<&str>, algorithm: &str) -> String {
    let Some(t) = t else { return String::new() };
    let Some(j) = t.algorithms.iter().position(|a| a == algorithm) else {
        return String::new();
    };
    match dataset {
        Some(d) => t
            .datasets
            .iter()
            .position(|x| x == d)
            .map(|i| fmt(t.ranks[i][j]))
            .unwrap_or_default(),
        None => fmt(t.mean_ranks()[j]),
    }
}

/// Per-(setting, dataset, algorithm) means, then one `*` row per algorithm
/// with cross-dataset means and average ranks.
pub fn summary_rows(records: &[MetricRecord]) -> Vec<Vec<String>> {
    let mut by_setting: BTreeMap<&str, Vec<MetricRecord>> = BTreeMap::new();
    for r in records {
        by_setting.entry(&r.setting).or_default().push(r.clone());
    }
    let mut rows = Vec::new();
    for (setting, recs) in by_setting {
        let tables = ranks(&recs);
        let mut cells: BTreeMap<(&str, &str), Vec<&MetricRecord>> = BTreeMap::new();
        for r in &recs {
            cells.entry((&r.dataset, &r.algorithm)).or_default().push(r);
        }
        let mut per_alg: BTreeMap<&str, Vec<[f64; 4]>> = BTreeMap::new();
        for ((dataset, algorithm), rs) in &cells {
            let m = [
                mean(&rs.iter().map(|r| r.aucroc).collect::<Vec<_>>()),
                mean(&rs.iter().map(|r| r.aucpr).collect::<Vec<_>>()),
                mean(&rs.iter().map(|r| r.fit_ms).collect::<Vec<_>>()),
                mean(&rs.iter().map(|r| r.score_ms).collect::<Vec<_>>()),
            ];
            per_alg.entry(algorithm).or_default().push(m);
            let mut row = vec![
                setting.to_string(),
                dataset.to_string(),
                algorithm.to_string(),
                rs.len().to_string(),
            ];
            row.extend(m.iter().map(|v| fmt(*v)));
            row.push(rank_of(&tables[0], Some(dataset), algorithm));
            row.push(rank_of(&tables[1], Some(dataset), algorithm));
            rows.push(row);
        }
        for (algorithm, ms) in per_alg {
            let mut row = vec![
                setting.to_string(),
                ALL_DATASETS.to_string(),
                algorithm.to_string(),
                ms.len().to_string(),
            ];
            row.extend((0..4).map(|c| fmt(mean(&ms.iter().map(|m| m[c]).collect::<Vec<_>>()))));
            row.push(rank_of(&tables[0], None, algorithm));
            row.push(rank_of(&tables[1], None, algorithm));
            rows.push(row);
        }
    }
    rows
}

pub fn emit_results(table: &ResultsTable, out_dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    write_results(&out_dir.join("results.csv"), &table.records)?;
    write_rows(
        &out_dir.join("summary.csv"),
        &SUMMARY_HEADER,
        summary_rows(&table.records),
    )?;
    write_rows(
        &out_dir.join("skipped.csv"),
        &SKIPPED_HEADER,
        table.skipped.iter().map(|s| {
            let mut r = key_fields(&s.key);
            r.push(s.reason.clone());
            r
        }),
    )?;
    write_rows(
        &out_dir.join("errors.csv"),
        &ERRORS_HEADER,
        table.errors.iter().map(|e| {
            let mut r = key_fields(&e.key);
            r.push(e.error.clone());
            r.push(e.message.clone());
            r
        }),
    )
}
