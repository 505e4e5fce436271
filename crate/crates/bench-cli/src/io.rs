//! CSV datasets: a header row, numeric feature columns and a trailing
//! `label` column holding 0 or 1.

use std::path::Path;

use anomaly_bench::{validate_dataset, DataMatrix, Dataset, Error, LabelVector};

use crate::error::{CliError, CliResult};

/// A dataset plus its feature column names.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvDataset {
    pub features: Vec<String>,
    pub data: Dataset,
}

pub fn load_csv(path: &Path) -> CliResult<CsvDataset> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_csv(file, path)
}

pub fn read_csv(reader: impl std::io::Read, path: &Path) -> CliResult<CsvDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let parse_err = |line: u64, column: usize, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        msg,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, 0, e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect::<Vec<_>>();
    if headers.last().map(String::as_str) != Some("label") {
        return Err(CliError::MissingLabelColumn {
            path: path.to_path_buf(),
        });
    }
    let d = headers.len() - 1;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| parse_err(line, 0, e.to_string()))?;
        if rec.len() != headers.len() {
            return Err(parse_err(
                line,
                rec.len().min(headers.len()) + 1,
                format!("expected {} fields, found {}", headers.len(), rec.len()),
            ));
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                parse_err(
                    line,
                    j + 1,
                    format!("`{cell}` in column `{}` is not a number", headers[j]),
                )
            })?;
            if j < d {
                values.push(v);
            } else {
                if v != 0.0 && v != 1.0 {
                    return Err(Error::LabelDomain {
                        index: i,
                        value: if v.fract() == 0.0 && v.abs() < 9e15 {
                            v as i64
                        } else {
                            i64::MIN
                        },
                    }
                    .into());
                }
                labels.push(v as u8);
            }
        }
    }
    let n = labels.len();
    let x = DataMatrix::new(n, d, values)?;
    let data = validate_dataset(x, LabelVector::new(labels)?)?;
    Ok(CsvDataset {
        features: headers[..d].to_vec(),
        data,
    })
}

/// Writes features and labels with shortest round-trip float formatting.
pub fn write_csv(path: &Path, features: &[String], data: &Dataset) -> CliResult<()> {
    let mut out = String::new();
    for f in features {
        out.push_str(f);
        out.push(',');
    }
    out.push_str("label\n");
    for (i, row) in data.x.row_iter().enumerate() {
        for v in row {
            out.push_str(&v.to_string());
            out.push(',');
        }
        out.push_str(&data.y[i].to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// `f0, f1, ...` for datasets without named columns.
pub fn default_feature_names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("f{j}")).collect()
}
