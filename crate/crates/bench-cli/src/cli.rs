//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use anomaly_bench::corrupt::{
    add_irrelevant_features, duplicate_anomalies, flip_labels, MAX_DUPLICATION, MAX_FLIP_RATIO, MAX_NOISE_RATIO,
};
use anomaly_bench::derive_seed;
use anomaly_bench::eval::{stratified_split, Metric, DEFAULT_ALPHA, TRAIN_FRACTION};
use anomaly_bench::synth::{assemble_synthetic, AnomalyType, SynthParams};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cd_render::render_cd;
use crate::config::BenchmarkConfig;
use crate::emit::{emit_results, read_results};
use crate::error::{CliError, CliResult};
use crate::grid::run_grid;
use crate::io::{load_csv, write_csv};

pub const THREADS_ENV: &str = "ADBENCH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "anomaly-bench", version, about = "Anomaly-detection benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a benchmark grid described by a TOML config.
    Run(RunArgs),
    /// Replace a dataset's anomalies with synthetic ones of a given type.
    Synth(SynthArgs),
    /// Split a dataset 70/30 and corrupt the split.
    Corrupt(CorruptArgs),
    /// Critical-difference diagram from a results.csv.
    Cd(CdArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; defaults to $ADBENCH_THREADS, then the config, then all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TypeArg {
    Local,
    Global,
    Dependency,
    Clustered,
}

impl From<TypeArg> for AnomalyType {
    fn from(t: TypeArg) -> Self {
        match t {
            TypeArg::Local => AnomalyType::Local,
            TypeArg::Global => AnomalyType::Global,
            TypeArg::Dependency => AnomalyType::Dependency,
            TypeArg::Clustered => AnomalyType::Clustered,
        }
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "type", value_enum)]
    anomaly_type: TypeArg,
    /// Defaults to 5 for local and clustered, 1.1 for global.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Duplicate,
    Irrelevant,
    Flip,
}

#[derive(Debug, Args)]
struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Duplication factor (1..=6), noise ratio or flip ratio (0..=0.5).
    #[arg(long)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base name; `<stem>_train.csv` and `<stem>_test.csv` are written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Aucroc,
    Aucpr,
}

#[derive(Debug, Args)]
struct CdArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, value_enum)]
    metric: MetricArg,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Required when the results hold more than one setting.
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 usage, 2 data.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Corrupt(a) => cmd_corrupt(a, out),
        Command::Cd(a) => cmd_cd(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn env_threads() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut cfg = BenchmarkConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(o) = a.out {
        cfg.output = o;
    }
    if a.threads == Some(0) {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    let threads = match a.threads {
        Some(n) => n,
        None => env_threads()?
            .or(cfg.threads)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let table = run_grid(&cfg, threads)?;
    emit_results(&table, &cfg.output)?;
    let _ = writeln!(
        out,
        "{} records, {} skipped, {} errors -> {}",
        table.records.len(),
        table.skipped.len(),
        table.errors.len(),
        cfg.output.display()
    );
    Ok(())
}

fn cmd_synth(a: SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(alpha) = a.alpha {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(CliError::Usage(format!("--alpha {alpha} must be positive")));
        }
    }
    let input = load_csv(&a.input)?;
    let mut params = SynthParams::new(a.anomaly_type.into(), a.seed);
    params.alpha = a.alpha;
    let ds = assemble_synthetic(&input.data, &params)?;
    write_csv(&a.out, &input.features, &ds)?;
    let _ = writeln!(
        out,
        "{} anomalies (alpha {}) -> {}",
        params.anomaly_type,
        params.alpha(),
        a.out.display()
    );
    Ok(())
}

/// `<dir>/<stem>_train.csv` and `<dir>/<stem>_test.csv` for `--out <dir>/<stem>.csv`.
pub fn corrupt_paths(out: &Path) -> (PathBuf, PathBuf) {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dir = out.parent().unwrap_or(Path::new(""));
    (
        dir.join(format!("{stem}_train.csv")),
        dir.join(format!("{stem}_test.csv")),
    )
}

fn cmd_corrupt(a: CorruptArgs, out: &mut dyn Write) -> CliResult<()> {
    let level_err = |range: &str| CliError::Usage(format!("--level {} outside {range} for mode {:?}", a.level, a.mode));
    let factor = match a.mode {
        ModeArg::Duplicate => {
            let ok = a.level.fract() == 0.0 && a.level >= 1.0 && a.level <= MAX_DUPLICATION as f64;
            if !ok {
                return Err(level_err("integers 1..=6"));
            }
            a.level as usize
        }
        ModeArg::Irrelevant if !(0.0..=MAX_NOISE_RATIO).contains(&a.level) => return Err(level_err("[0, 0.5]")),
        ModeArg::Flip if !(0.0..=MAX_FLIP_RATIO).contains(&a.level) => return Err(level_err("[0, 0.5]")),
        _ => 0,
    };
    let input = load_csv(&a.input)?;
    let split = stratified_split(&input.data, TRAIN_FRACTION, derive_seed(a.seed, &[0]))?;
    let s = derive_seed(a.seed, &[1]);
    let (split, features) = match a.mode {
        ModeArg::Duplicate => (duplicate_anomalies(&split, factor, s)?, input.features),
        ModeArg::Flip => (flip_labels(&split, a.level, s)?, input.features),
        ModeArg::Irrelevant => {
            let out = add_irrelevant_features(&split, a.level, s)?;
            let mut names = input.features;
            for j in names.len()..out.train.n_features() {
                names.push(format!("noise{}", j));
            }
            (out, names)
        }
    };
    let (train_path, test_path) = corrupt_paths(&a.out);
    write_csv(&train_path, &features, &split.train)?;
    write_csv(&test_path, &features, &split.test)?;
    let _ = writeln!(out, "{} + {}", train_path.display(), test_path.display());
    Ok(())
}

fn cmd_cd(a: CdArgs, out: &mut dyn Write) -> CliResult<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha {} must lie in (0, 1)", a.alpha)));
    }
    let metric = match a.metric {
        MetricArg::Aucroc => Metric::AucRoc,
        MetricArg::Aucpr => Metric::AucPr,
    };
    let records = read_results(&a.results)?;
    let cd = render_cd(&records, metric, a.alpha, a.setting.as_deref(), &a.out)?;
    let _ = writeln!(
        out,
        "friedman p {:.4}, {} cliques -> {}",
        cd.friedman_p,
        cd.cliques.len(),
        a.out.display()
    );
    Ok(())
}
