//! CSV ingest and the canonical dataset dump.
//!
//! Required columns are CULTIVAR, DATE and MIN_AT; SEASON_JDAY, LTE10,
//! LTE50, LTE90, AVG_AT and MAX_AT are optional. Header names are matched
//! case-insensitively after trimming. An empty cell is the only missing
//! value; anything else that fails to parse is a row error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use phenotopo_core::calendar::{season_jday, Date};
use phenotopo_core::model::{LteLevel, LTE_MAX_C, LTE_MIN_C};
use phenotopo_core::{Dataset, Observation};
use thiserror::Error;

const REQUIRED: [&str; 3] = ["CULTIVAR", "DATE", "MIN_AT"];
const OPTIONAL: [&str; 6] = ["SEASON_JDAY", "LTE10", "LTE50", "LTE90", "AVG_AT", "MAX_AT"];

/// Column order of [`emit_csv`].
pub const DUMP_HEADER: [&str; 9] =
    ["CULTIVAR", "DATE", "LTE10", "LTE50", "LTE90", "SEASON_JDAY", "MIN_AT", "AVG_AT", "MAX_AT"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing required column {0}")]
    MissingColumn(&'static str),
    #[error("column {0} appears more than once")]
    DuplicateColumn(String),
    #[error("no header row")]
    NoHeader,
    /// `row` counts data rows from 1; the header is not a row.
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("input is not valid UTF-8 near row {row}")]
    NotUtf8 { row: usize },
    #[error("read error: {0}")]
    Io(#[from] io::Error),
}

/// An [`IngestError`] tied to the file it came from.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Open { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: IngestError },
    #[error("{}: row {row}: duplicate key ({cultivar}, {season}, day {jday}) already read from {}", path.display(), first.display())]
    DuplicateAcrossFiles { path: PathBuf, row: usize, first: PathBuf, cultivar: String, season: String, jday: u16 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject duplicate (cultivar, season, jday) keys and LTE values
    /// outside the sanity bounds. Off, they are left for `validate_dataset`.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A provided SEASON_JDAY disagreed with the date; the computed value
    /// was kept.
    JdayMismatch { row: usize, given: i64, computed: u16 },
    LteOrdering { row: usize, warmer: LteLevel, colder: LteLevel },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::JdayMismatch { row, given, computed } => {
                write!(f, "row {row}: SEASON_JDAY {given} disagrees with date, using {computed}")
            }
            Warning::LteOrdering { row, warmer, colder } => {
                write!(f, "row {row}: {warmer} is colder than {colder}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Parsed {
    pub dataset: Dataset,
    /// Data-row number (from 1) of each observation.
    pub rows: Vec<usize>,
    /// Rows dated outside the dormant-season window.
    pub dropped: usize,
    pub warnings: Vec<Warning>,
}

struct Columns {
    cultivar: usize,
    date: usize,
    min_at: usize,
    season_jday: Option<usize>,
    lte: [Option<usize>; 3],
    avg_at: Option<usize>,
    max_at: Option<usize>,
}

impl Columns {
    fn locate(header: &csv::StringRecord) -> Result<Self, IngestError> {
        let mut found: BTreeMap<String, usize> = BTreeMap::new();
        for (idx, name) in header.iter().enumerate() {
            let name = name.trim().to_ascii_uppercase();
            if (REQUIRED.contains(&name.as_str()) || OPTIONAL.contains(&name.as_str()))
                && found.insert(name.clone(), idx).is_some()
            {
                return Err(IngestError::DuplicateColumn(name));
            }
        }
        let required = |name: &'static str| found.get(name).copied().ok_or(IngestError::MissingColumn(name));
        Ok(Columns {
            cultivar: required("CULTIVAR")?,
            date: required("DATE")?,
            min_at: required("MIN_AT")?,
            season_jday: found.get("SEASON_JDAY").copied(),
            lte: [found.get("LTE10").copied(), found.get("LTE50").copied(), found.get("LTE90").copied()],
            avg_at: found.get("AVG_AT").copied(),
            max_at: found.get("MAX_AT").copied(),
        })
    }
}

fn row_error(row: usize, message: impl Into<String>) -> IngestError {
    IngestError::Row { row, message: message.into() }
}

fn cell(record: &csv::StringRecord, idx: Option<usize>) -> Option<&str> {
    idx.and_then(|i| record.get(i)).map(str::trim).filter(|s| !s.is_empty())
}

fn number(row: usize, column: &str, text: Option<&str>) -> Result<Option<f64>, IngestError> {
    let Some(text) = text else { return Ok(None) };
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(row_error(row, format!("{column}: cannot parse {text:?} as a number"))),
    }
}

/// Parses one CSV source into observations, dropping rows outside the
/// dormant season.
pub fn parse_csv<R: Read>(source: R, options: &ParseOptions) -> Result<Parsed, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h.map_err(|e| csv_error(e, 0))?,
        None => return Err(IngestError::NoHeader),
    };
    let columns = Columns::locate(&header)?;

    let mut out = Parsed::default();
    let mut observations = Vec::new();
    let mut keys: BTreeMap<(String, String, u16), usize> = BTreeMap::new();
    for (idx, record) in records.enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| csv_error(e, row))?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let cultivar = cell(&record, Some(columns.cultivar)).ok_or_else(|| row_error(row, "CULTIVAR is empty"))?;
        let date_text = cell(&record, Some(columns.date)).ok_or_else(|| row_error(row, "DATE is empty"))?;
        let date = Date::parse_iso(date_text).map_err(|e| row_error(row, format!("DATE: {e}")))?;
        let min_air_temp = number(row, "MIN_AT", cell(&record, Some(columns.min_at)))?
            .ok_or_else(|| row_error(row, "MIN_AT is empty"))?;
        let [lte10, lte50, lte90] = [
            number(row, "LTE10", cell(&record, columns.lte[0]))?,
            number(row, "LTE50", cell(&record, columns.lte[1]))?,
            number(row, "LTE90", cell(&record, columns.lte[2]))?,
        ];
        let avg_air_temp = number(row, "AVG_AT", cell(&record, columns.avg_at))?;
        let max_air_temp = number(row, "MAX_AT", cell(&record, columns.max_at))?;
        let given_jday = match cell(&record, columns.season_jday) {
            Some(text) => Some(
                text.parse::<i64>()
                    .map_err(|_| row_error(row, format!("SEASON_JDAY: cannot parse {text:?} as an integer")))?,
            ),
            None => None,
        };

        let Some((season, jday)) = season_jday(date) else {
            out.dropped += 1;
            continue;
        };
        if let Some(given) = given_jday {
            if given != i64::from(jday) {
                out.warnings.push(Warning::JdayMismatch { row, given, computed: jday });
            }
        }

        let observation = Observation {
            cultivar: cultivar.to_string(),
            date,
            season,
            season_jday: jday,
            lte10,
            lte50,
            lte90,
            min_air_temp,
            avg_air_temp,
            max_air_temp,
        };
        for level in LteLevel::ALL {
            if let Some(v) = observation.lte(level) {
                if options.strict && !(LTE_MIN_C..=LTE_MAX_C).contains(&v) {
                    return Err(row_error(row, format!("{level} value {v} outside [{LTE_MIN_C}, {LTE_MAX_C}] °C")));
                }
            }
        }
        for (warmer, colder) in [
            (LteLevel::Lte10, LteLevel::Lte50),
            (LteLevel::Lte50, LteLevel::Lte90),
            (LteLevel::Lte10, LteLevel::Lte90),
        ] {
            if let (Some(w), Some(c)) = (observation.lte(warmer), observation.lte(colder)) {
                if w < c {
                    out.warnings.push(Warning::LteOrdering { row, warmer, colder });
                }
            }
        }
        let key = (observation.cultivar.clone(), observation.season.clone(), jday);
        if let Some(&first) = keys.get(&key) {
            if options.strict {
                return Err(row_error(
                    row,
                    format!("duplicate key ({}, {}, day {}) first seen at row {first}", key.0, key.1, key.2),
                ));
            }
        } else {
            keys.insert(key, row);
        }
        observations.push(observation);
        out.rows.push(row);
    }
    out.dataset = Dataset::from_observations(observations);
    Ok(out)
}

fn csv_error(e: csv::Error, row: usize) -> IngestError {
    match e.kind() {
        csv::ErrorKind::Utf8 { .. } => IngestError::NotUtf8 { row },
        _ => match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            other => row_error(row, format!("{other:?}")),
        },
    }
}

/// A parsed file together with where each observation came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ingested {
    pub dataset: Dataset,
    /// (input index, data row) of each observation.
    pub sources: Vec<(usize, usize)>,
    pub dropped: Vec<usize>,
    pub warnings: Vec<(usize, Warning)>,
}

/// Reads and merges several files in order. In strict mode a key repeated
/// across files is an error, as it is within one file.
pub fn read_files<P: AsRef<Path>>(paths: &[P], options: &ParseOptions) -> Result<Ingested, FileError> {
    let mut merged = Ingested::default();
    let mut first_seen: BTreeMap<(String, String, u16), usize> = BTreeMap::new();
    for (input, path) in paths.iter().enumerate() {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| FileError::Open { path: path.to_path_buf(), source })?;
        let parsed = parse_csv(io::BufReader::new(file), options)
            .map_err(|source| FileError::Parse { path: path.to_path_buf(), source })?;
        for (obs, &row) in parsed.dataset.observations().iter().zip(&parsed.rows) {
            let key = (obs.cultivar.clone(), obs.season.clone(), obs.season_jday);
            match first_seen.get(&key) {
                Some(&other) if options.strict && other != input => {
                    return Err(FileError::DuplicateAcrossFiles {
                        path: path.to_path_buf(),
                        row,
                        first: paths[other].as_ref().to_path_buf(),
                        cultivar: key.0,
                        season: key.1,
                        jday: key.2,
                    });
                }
                Some(_) => {}
                None => {
                    first_seen.insert(key, input);
                }
            }
            merged.sources.push((input, row));
        }
        merged.dropped.push(parsed.dropped);
        merged.warnings.extend(parsed.warnings.into_iter().map(|w| (input, w)));
        merged.dataset = std::mem::take(&mut merged.dataset).merge(parsed.dataset);
    }
    Ok(merged)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the dataset in [`DUMP_HEADER`] layout, observations in dataset
/// order. Floats use the shortest text that parses back to the same value.
pub fn emit_csv<W: Write>(dataset: &Dataset, sink: W) -> io::Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    writer.write_record(DUMP_HEADER)?;
    for o in dataset.observations() {
        writer.write_record([
            o.cultivar.clone(),
            o.date.to_string(),
            opt(o.lte10),
            opt(o.lte50),
            opt(o.lte90),
            o.season_jday.to_string(),
            o.min_air_temp.to_string(),
            opt(o.avg_air_temp),
            opt(o.max_air_temp),
        ])?;
    }
    writer.flush()
}
