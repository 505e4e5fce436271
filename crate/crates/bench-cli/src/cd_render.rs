//! Critical-difference diagram as SVG plus a plain-text companion.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anomaly_bench::eval::{cd_cliques, rank_matrix, Aggregation, CdResult, Metric, MetricRecord};

use crate::error::{CliError, CliResult};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 80.0;
const AXIS_Y: f64 = 60.0;
const BAR_GAP: f64 = 14.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Picks the records of `setting`, or of the only setting present.
pub fn select_setting(records: &[MetricRecord], setting: Option<&str>) -> CliResult<Vec<MetricRecord>> {
    let settings: std::collections::BTreeSet<&str> = records.iter().map(|r| r.setting.as_str()).collect();
    let chosen = match setting {
        Some(s) if settings.contains(s) => s,
        Some(s) => return Err(CliError::Usage(format!("setting `{s}` not found in results"))),
        None if settings.len() == 1 => *settings.iter().next().unwrap(),
        None if settings.is_empty() => return Err(CliError::Usage("results are empty".into())),
        None => {
            return Err(CliError::Usage(format!(
                "results hold several settings ({}); pass --setting",
                settings.into_iter().collect::<Vec<_>>().join(", ")
            )))
        }
    };
    Ok(records.iter().filter(|r| r.setting == chosen).cloned().collect())
}

pub fn svg(cd: &CdResult) -> String {
    let k = cd.algorithms.len();
    let x_of = |rank: f64| MARGIN + (rank - 1.0) / (k as f64 - 1.0).max(1.0) * (WIDTH - 2.0 * MARGIN);
    let label_rows = k.div_ceil(2);
    let bars_top = AXIS_Y + 24.0;
    let labels_top = bars_top + cd.cliques.len() as f64 * BAR_GAP + 20.0;
    let height = labels_top + label_rows as f64 * 18.0 + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{MARGIN}" y1="{AXIS_Y}" x2="{}" y2="{AXIS_Y}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for r in 1..=k {
        let x = x_of(r as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{AXIS_Y}" stroke="black"/>"#,
            AXIS_Y - 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle">{r}</text>"#,
            AXIS_Y - 10.0
        );
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| cd.mean_ranks[a].total_cmp(&cd.mean_ranks[b]).then(a.cmp(&b)));
    for (pos, &j) in order.iter().enumerate() {
        let x = x_of(cd.mean_ranks[j]);
        let y = labels_top + (pos / 2) as f64 * 18.0;
        let (anchor, tx) = if pos % 2 == 0 {
            ("end", MARGIN - 10.0)
        } else {
            ("start", WIDTH - MARGIN + 10.0)
        };
        let _ = writeln!(
            s,
            r#"<polyline class="tick" data-algorithm="{name}" points="{x},{AXIS_Y} {x},{y} {tx},{y}" fill="none" stroke="gray"/>"#,
            name = escape(&cd.algorithms[j])
        );
        let _ = writeln!(
            s,
            r#"<text x="{tx}" y="{}" text-anchor="{anchor}">{} ({:.2})</text>"#,
            y + 4.0,
            escape(&cd.algorithms[j]),
            cd.mean_ranks[j]
        );
    }
    for (i, c) in cd.cliques.iter().enumerate() {
        let lo = c.iter().map(|&j| cd.mean_ranks[j]).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|&j| cd.mean_ranks[j]).fold(f64::NEG_INFINITY, f64::max);
        let y = bars_top + i as f64 * BAR_GAP;
        let members: Vec<String> = c.iter().map(|&j| escape(&cd.algorithms[j])).collect();
        let _ = writeln!(
            s,
            r#"<line class="clique" data-members="{}" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black" stroke-width="4"/>"#,
            members.join(","),
            x_of(lo) - 3.0,
            x_of(hi) + 3.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn text(cd: &CdResult, metric: Metric, setting: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "setting {setting}");
    let _ = writeln!(s, "metric {metric}");
    let _ = writeln!(s, "alpha {}", cd.alpha);
    let _ = writeln!(s, "friedman_statistic {}", cd.friedman_statistic);
    let _ = writeln!(s, "friedman_p {}", cd.friedman_p);
    s.push_str("\n[mean_ranks]\n");
    for (a, r) in cd.algorithms.iter().zip(&cd.mean_ranks) {
        let _ = writeln!(s, "{a} {r}");
    }
    s.push_str("\n[adjusted_p]\n");
    let _ = writeln!(s, "-,{}", cd.algorithms.join(","));
    for (a, row) in cd.algorithms.iter().zip(&cd.adjusted_p) {
        let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{a},{}", vals.join(","));
    }
    s.push_str("\n[cliques]\n");
    for c in &cd.cliques {
        let names: Vec<&str> = c.iter().map(|&j| cd.algorithms[j].as_str()).collect();
        let _ = writeln!(s, "{}", names.join(" "));
    }
    s
}

pub fn companion_path(svg_path: &Path) -> PathBuf {
    svg_path.with_extension("txt")
}

/// Computes the CD analysis for one setting and writes the SVG and its
/// `.txt` companion.
pub fn render_cd(
    records: &[MetricRecord],
    metric: Metric,
    alpha: f64,
    setting: Option<&str>,
    out: &Path,
) -> CliResult<CdResult> {
    let recs = select_setting(records, setting)?;
    let table = rank_matrix(&recs, metric, Aggregation::Mean)?;
    let cd = cd_cliques(&table, alpha)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(out, svg(&cd)).map_err(|e| CliError::io(out, e))?;
    let txt = companion_path(out);
    std::fs::write(&txt, text(&cd, metric, &recs[0].setting)).map_err(|e| CliError::io(&txt, e))?;
    Ok(cd)
}

/// Clique memberships read back from an SVG written by [`render_cd`].
pub fn parse_svg_cliques(svg: &str) -> Vec<Vec<String>> {
    svg.lines()
        .filter(|l| l.contains(r#"class="clique""#))
        .filter_map(|l| {
            let start = l.find(r#"data-members=""#)? + r#"data-members=""#.len();
            let end = start + l[start..].find('"')?;
            Some(l[start..end].split(',').map(str::to_string).collect())
        })
        .collect()
}
