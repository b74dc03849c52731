//! The `phenotopo` command line.
//!
//! Exit status: 0 on success, 1 when the data fails (parse errors,
//! validation failures, unknown keys, degenerate groups), 2 on usage or IO
//! errors. Data goes to `--out` or stdout, diagnostics to stderr. Files are
//! written to a temporary sibling and renamed into place only on success.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use phenotopo_core::analysis::DEFAULT_MIN_PERSISTENCE;
use phenotopo_core::calendar::season_label;
use phenotopo_core::{
    branching_events, divergence_matrix, filter, group_diagrams, summarize_matrix, validate_dataset,
    AnalysisOptions, AssemblyOptions, Dataset, DeltaSign, GroupKind, Ground, LteLevel, MatchingConfig, NormScope,
};
use serde::{Deserialize, Serialize};

use crate::formats;
use crate::ingest::{self, FileError, Ingested, ParseOptions};
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "phenotopo", version, about = "Persistent-homology divergence analysis of cold-hardiness data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the input against every dataset rule and print a JSON report.
    Validate(InputArgs),
    /// Persistence diagram of one group as JSON, optionally plotted.
    Diagram {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        group: GroupArgs,
        /// Also write a birth/death plot here.
        #[arg(long, value_name = "SVG")]
        svg: Option<PathBuf>,
    },
    /// Pairwise Wasserstein distances between groups as a labeled CSV.
    Matrix {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        matching: MatchArgs,
        /// Decimal places in the CSV.
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Means and extremes of a distance matrix as JSON.
    Summarize {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        matching: MatchArgs,
        /// Summarize this matrix CSV instead of computing one.
        #[arg(long, value_name = "CSV")]
        matrix: Option<PathBuf>,
    },
    /// Branching events of one group as CSV, optionally plotted.
    Events {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        min_persistence: Option<f64>,
        /// Also write the point cloud with event cycles here.
        #[arg(long, value_name = "SVG")]
        svg: Option<PathBuf>,
    },
    /// The parsed dataset in canonical CSV layout.
    Dump(InputArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV; repeat to merge several files.
    #[arg(long = "in", value_name = "CSV")]
    inputs: Vec<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Keep only these cultivars.
    #[arg(long, value_delimiter = ',')]
    cultivars: Option<Vec<String>>,
    /// Keep only these seasons; `1999:2022` expands to every season between.
    #[arg(long, value_delimiter = ',')]
    seasons: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct GroupArgs {
    #[arg(long, value_enum)]
    group: Option<GroupArg>,
    /// Group labels, comma-separated; season ranges like `1999:2022` allowed.
    /// Defaults to every label present.
    #[arg(long, value_delimiter = ',')]
    keys: Option<Vec<String>>,
    /// LTE percentile: 10, 50 or 90.
    #[arg(long)]
    lte: Option<u8>,
    #[arg(long, value_enum)]
    delta_sign: Option<SignArg>,
    #[arg(long, value_enum)]
    norm_scope: Option<ScopeArg>,
    /// Rips threshold; defaults to each cloud's enclosing radius.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Debug, Args)]
struct MatchArgs {
    /// Wasserstein order.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum)]
    ground: Option<GroundArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum GroupArg {
    Cultivar,
    Season,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SignArg {
    MinAirMinusLte,
    LteMinusMinAir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ScopeArg {
    CultivarSeason,
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
enum GroundArg {
    #[value(name = "linf")]
    #[serde(rename = "linf")]
    LInf,
    #[value(name = "l2")]
    #[serde(rename = "l2")]
    L2,
}

/// Contents of a `--config` file. Flags given on the command line win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    #[serde(rename = "in")]
    inputs: Option<Vec<PathBuf>>,
    out: Option<PathBuf>,
    cultivars: Option<Vec<String>>,
    seasons: Option<Vec<String>>,
    group: Option<GroupArg>,
    keys: Option<Vec<String>>,
    lte: Option<u8>,
    delta_sign: Option<SignArg>,
    norm_scope: Option<ScopeArg>,
    threshold: Option<f64>,
    p: Option<f64>,
    ground: Option<GroundArg>,
    precision: Option<usize>,
    min_persistence: Option<f64>,
    svg: Option<PathBuf>,
    matrix: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Data(_) => 1,
            Failure::Usage(_) | Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Data(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

/// Runs the real process: arguments from the OS, real stdout and stderr.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`execute`] with explicit streams.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(stderr, "phenotopo: {line} (see --help)");
            return 2;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "phenotopo: {}", failure.message());
            failure.code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    let Some(path) = path else { return Ok(ConfigFile::default()) };
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: invalid config: {e}", path.display())))
}

/// Expands `YYYY:ZZZZ` into the season labels from `YYYY-(YYYY+1)` up to
/// `(ZZZZ-1)-ZZZZ`; other entries pass through.
fn expand_seasons(keys: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut out = Vec::new();
    for key in keys {
        let key = key.trim().to_string();
        match key.split_once(':') {
            Some((a, b)) => {
                let bad = || Failure::Usage(format!("bad season range {key:?}, expected e.g. 1999:2022"));
                let (a, b): (i32, i32) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a >= b {
                    return Err(bad());
                }
                out.extend((a..b).map(season_label));
            }
            None if !key.is_empty() => out.push(key),
            None => {}
        }
    }
    Ok(out)
}

fn trimmed(keys: Vec<String>) -> Vec<String> {
    keys.into_iter().map(|k| k.trim().to_string()).filter(|k| !k.is_empty()).collect()
}

/// Everything about the input side, after merging flags over config.
struct Input {
    paths: Vec<PathBuf>,
    out: Option<PathBuf>,
    cultivars: Option<Vec<String>>,
    seasons: Option<Vec<String>>,
}

impl Input {
    fn resolve(args: InputArgs, config: &mut ConfigFile) -> Result<Self, Failure> {
        let paths = if args.inputs.is_empty() { config.inputs.take().unwrap_or_default() } else { args.inputs };
        let seasons = match args.seasons.or(config.seasons.take()) {
            Some(s) => Some(expand_seasons(s)?),
            None => None,
        };
        Ok(Input {
            paths,
            out: args.out.or(config.out.take()),
            cultivars: args.cultivars.or(config.cultivars.take()).map(trimmed),
            seasons,
        })
    }

    /// Reads, merges and filters the inputs.
    fn load(&self, options: &ParseOptions, stderr: &mut dyn Write) -> Result<(Dataset, Ingested), Failure> {
        if self.paths.is_empty() {
            return Err(Failure::Usage("no input given, pass --in <CSV>".into()));
        }
        let ingested = ingest::read_files(&self.paths, options).map_err(|e| match e {
            FileError::Open { .. } => Failure::Io(e.to_string()),
            _ => data(e),
        })?;
        report_ingest(&self.paths, &ingested, stderr);
        let dataset = filter(&ingested.dataset, self.cultivars.as_deref(), self.seasons.as_deref()).map_err(data)?;
        Ok((dataset, ingested))
    }
}

const SHOWN_WARNINGS: usize = 10;

fn report_ingest(paths: &[PathBuf], ingested: &Ingested, stderr: &mut dyn Write) {
    for (path, dropped) in paths.iter().zip(&ingested.dropped) {
        if *dropped > 0 {
            let _ = writeln!(stderr, "phenotopo: {}: dropped {dropped} row(s) outside the dormant season", path.display());
        }
    }
    if ingested.warnings.is_empty() {
        return;
    }
    let _ = writeln!(stderr, "phenotopo: {} warning(s)", ingested.warnings.len());
    for (input, warning) in ingested.warnings.iter().take(SHOWN_WARNINGS) {
        let _ = writeln!(stderr, "phenotopo: {}: {warning}", paths[*input].display());
    }
    if ingested.warnings.len() > SHOWN_WARNINGS {
        let _ = writeln!(stderr, "phenotopo: ... and {} more", ingested.warnings.len() - SHOWN_WARNINGS);
    }
}

/// Grouping, keys and analysis options after merging flags over config.
struct Grouped {
    kind: GroupKind,
    keys: Option<Vec<String>>,
    options: AnalysisOptions,
}

impl Grouped {
    fn resolve(args: GroupArgs, config: &mut ConfigFile) -> Result<Self, Failure> {
        let kind = match args.group.or(config.group) {
            Some(GroupArg::Season) => GroupKind::Season,
            Some(GroupArg::Cultivar) | None => GroupKind::Cultivar,
        };
        let keys = match args.keys.or(config.keys.take()) {
            Some(k) if kind == GroupKind::Season => Some(expand_seasons(k)?),
            Some(k) => Some(trimmed(k)),
            None => None,
        };
        let lte = args.lte.or(config.lte).unwrap_or(50);
        let level = LteLevel::from_percent(lte)
            .ok_or_else(|| Failure::Usage(format!("--lte must be 10, 50 or 90, got {lte}")))?;
        let sign = match args.delta_sign.or(config.delta_sign) {
            Some(SignArg::LteMinusMinAir) => DeltaSign::LteMinusMinAir,
            _ => DeltaSign::MinAirMinusLte,
        };
        let scope = match args.norm_scope.or(config.norm_scope) {
            Some(ScopeArg::Pooled) => NormScope::Pooled,
            _ => NormScope::CultivarSeason,
        };
        let threshold = args.threshold.or(config.threshold);
        if let Some(t) = threshold {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::Usage(format!("--threshold must be positive, got {t}")));
            }
        }
        Ok(Grouped { kind, keys, options: AnalysisOptions { assembly: AssemblyOptions { level, sign, scope }, threshold } })
    }

    fn keys_for(&self, dataset: &Dataset) -> Vec<String> {
        match &self.keys {
            Some(k) => k.clone(),
            None => match self.kind {
                GroupKind::Cultivar => dataset.cultivars().iter().cloned().collect(),
                GroupKind::Season => dataset.seasons().iter().cloned().collect(),
            },
        }
    }

    fn single_key(&self, dataset: &Dataset, command: &str) -> Result<String, Failure> {
        let keys = self.keys_for(dataset);
        match keys.as_slice() {
            [key] => Ok(key.clone()),
            _ => Err(Failure::Usage(format!(
                "{command} needs exactly one {} key, got {} (use --keys)",
                self.kind,
                keys.len()
            ))),
        }
    }
}

fn matching(args: MatchArgs, config: &ConfigFile) -> Result<MatchingConfig, Failure> {
    let p = args.p.or(config.p).unwrap_or(1.0);
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Failure::Usage(format!("--p must be a finite number >= 1, got {p}")));
    }
    let ground = match args.ground.or(config.ground) {
        Some(GroundArg::L2) => Ground::L2,
        _ => Ground::LInf,
    };
    Ok(MatchingConfig { p, ground, ..MatchingConfig::default() })
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to `stdout` when there is no path.
fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    let io_err = |p: &Path, e: io::Error| Failure::Io(format!("{}: {e}", p.display()));
    match path {
        None => stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
            tmp.write_all(bytes).and_then(|_| tmp.flush()).map_err(|e| io_err(path, e))?;
            tmp.persist(path).map_err(|e| io_err(path, e.error))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ViolationJson {
    input: String,
    row: usize,
    rule: String,
}

#[derive(Serialize)]
struct ValidationJson {
    ok: bool,
    observations: usize,
    cultivars: Vec<String>,
    seasons: Vec<String>,
    dropped: usize,
    warnings: Vec<String>,
    violations: Vec<ViolationJson>,
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate(input) => {
            let mut config = load_config(input.config.as_deref())?;
            let input = Input::resolve(input, &mut config)?;
            let (dataset, ingested) = input.load(&ParseOptions { strict: false }, stderr)?;
            let report = validate_dataset(&dataset);
            // Observations keep their order through filtering, so map back
            // through the surviving source rows.
            let sources: Vec<(usize, usize)> = ingested
                .dataset
                .observations()
                .iter()
                .zip(&ingested.sources)
                .filter(|(o, _)| {
                    input.cultivars.as_ref().is_none_or(|c| c.contains(&o.cultivar))
                        && input.seasons.as_ref().is_none_or(|s| s.contains(&o.season))
                })
                .map(|(_, s)| *s)
                .collect();
            let path_of = |i: usize| input.paths[i].display().to_string();
            let json = ValidationJson {
                ok: report.is_ok(),
                observations: report.observation_count,
                cultivars: dataset.cultivars().iter().cloned().collect(),
                seasons: dataset.seasons().iter().cloned().collect(),
                dropped: ingested.dropped.iter().sum(),
                warnings: ingested.warnings.iter().map(|(i, w)| format!("{}: {w}", path_of(*i))).collect(),
                violations: report
                    .violations
                    .iter()
                    .map(|v| {
                        let (file, row) = sources[v.row];
                        ViolationJson { input: path_of(file), row, rule: v.rule.to_string() }
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
            text.push('\n');
            emit(input.out.as_deref(), text.as_bytes(), stdout)?;
            if report.is_ok() {
                Ok(0)
            } else {
                let _ = writeln!(stderr, "phenotopo: {} violation(s)", report.violations.len());
                Ok(1)
            }
        }
        Command::Dump(input) => {
            let mut config = load_config(input.config.as_deref())?;
            let input = Input::resolve(input, &mut config)?;
            let (dataset, _) = input.load(&ParseOptions::default(), stderr)?;
            let mut bytes = Vec::new();
            ingest::emit_csv(&dataset, &mut bytes).map_err(|e| Failure::Io(e.to_string()))?;
            emit(input.out.as_deref(), &bytes, stdout)?;
            Ok(0)
        }
        Command::Diagram { input, group, svg } => {
            let mut config = load_config(input.config.as_deref())?;
            let input = Input::resolve(input, &mut config)?;
            let grouped = Grouped::resolve(group, &mut config)?;
            let svg = svg.or(config.svg.take());
            let (dataset, _) = input.load(&ParseOptions::default(), stderr)?;
            let key = grouped.single_key(&dataset, "diagram")?;
            let g = group_diagrams(&dataset, grouped.kind, &[key], &grouped.options).map_err(data)?.remove(0);
            let json = formats::diagram_json(&g.diagram);
            let plot = svg.as_ref().map(|_| svg::diagram_svg(&g.diagram, &format!("{} {}", grouped.kind, g.label)));
            if let (Some(path), Some(plot)) = (&svg, &plot) {
                emit(Some(path), plot.as_bytes(), stdout)?;
            }
            emit(input.out.as_deref(), json.as_bytes(), stdout)?;
            Ok(0)
        }
        Command::Matrix { input, group, matching: m, precision } => {
            let mut config = load_config(input.config.as_deref())?;
            let input = Input::resolve(input, &mut config)?;
            let grouped = Grouped::resolve(group, &mut config)?;
            let cfg = matching(m, &config)?;
            let precision = precision.or(config.precision).unwrap_or(6);
            let (dataset, _) = input.load(&ParseOptions::default(), stderr)?;
            let keys = grouped.keys_for(&dataset);
            let matrix = divergence_matrix(&dataset, grouped.kind, &keys, &grouped.options, &cfg).map_err(data)?;
            emit(input.out.as_deref(), formats::matrix_csv(&matrix, precision).as_bytes(), stdout)?;
            Ok(0)
        }
        Command::Summarize { input, group, matching: m, matrix } => {
            let mut config = load_config(input.config.as_deref())?;
            let input = Input::resolve(input, &mut config)?;
            let grouped = Grouped::resolve(group, &mut config)?;
            let cfg = matching(m, &config)?;
            let matrix = match matrix.or(config.matrix.take()) {
                Some(path) => {
                    let file = fs::File::open(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    formats::parse_matrix_csv(io::BufReader::new(file))
                        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?
                }
                None => {
                    let (dataset, _) = input.load(&ParseOptions::default(), stderr)?;
                    let keys = grouped.keys_for(&dataset);
                    divergence_matrix(&dataset, grouped.kind, &keys, &grouped.options, &cfg).map_err(data)?
                }
            };
            let summary = summarize_matrix(&matrix).map_err(data)?;
            emit(input.out.as_deref(), formats::summary_json(&summary).as_bytes(), stdout)?;
            Ok(0)
        }
        Command::Events { input, group, min_persistence, svg } => {
            let mut config = load_config(input.config.as_deref())?;
            let input = Input::resolve(input, &mut config)?;
            let grouped = Grouped::resolve(group, &mut config)?;
            let min_persistence = min_persistence.or(config.min_persistence).unwrap_or(DEFAULT_MIN_PERSISTENCE);
            if !(min_persistence >= 0.0) {
                return Err(Failure::Usage(format!("--min-persistence must be >= 0, got {min_persistence}")));
            }
            let svg = svg.or(config.svg.take());
            let (dataset, _) = input.load(&ParseOptions::default(), stderr)?;
            let key = grouped.single_key(&dataset, "events")?;
            let g = group_diagrams(&dataset, grouped.kind, &[key], &grouped.options).map_err(data)?.remove(0);
            let events = branching_events(&g.diagram, &g.cloud, min_persistence).map_err(data)?;
            if let Some(path) = &svg {
                let title = format!("branching events, {} {}", grouped.kind, g.label);
                emit(Some(path), svg::events_svg(&g.cloud, &events, &title).as_bytes(), stdout)?;
            }
            emit(input.out.as_deref(), formats::events_csv(&g.label, &events).as_bytes(), stdout)?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn season_ranges_expand() {
        let keys = expand_seasons(vec!["1999:2002".into(), " 2017-2018".into()]).unwrap();
        assert_eq!(keys, ["1999-2000", "2000-2001", "2001-2002", "2017-2018"]);
        assert!(matches!(expand_seasons(vec!["2002:1999".into()]), Err(Failure::Usage(_))));
        assert!(matches!(expand_seasons(vec!["x:2000".into()]), Err(Failure::Usage(_))));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["phenotopo", "matrix", "--bogus"], &mut out, &mut err);
        assert_eq!(code, 2);
        let err = String::from_utf8(err).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.contains("--bogus"));
        assert!(out.is_empty());
    }

    #[test]
    fn missing_input_is_a_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["phenotopo", "dump"], &mut out, &mut err), 2);
        assert!(String::from_utf8(err).unwrap().contains("--in"));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let parsed: Result<ConfigFile, _> = serde_json::from_str(r#"{"group": "season", "colour": 1}"#);
        assert!(parsed.is_err());
        let parsed: ConfigFile =
            serde_json::from_str(r#"{"group": "season", "ground": "l2", "delta-sign": "lte-minus-min-air"}"#).unwrap();
        assert_eq!(parsed.group, Some(GroupArg::Season));
        assert_eq!(parsed.ground, Some(GroundArg::L2));
        assert_eq!(parsed.delta_sign, Some(SignArg::LteMinusMinAir));
    }
}
