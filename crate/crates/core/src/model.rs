//! Domain types shared by every stage of the pipeline, plus dataset-level
//! validation and filtering.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::calendar::{self, Date, SEASON_FIRST_JDAY, SEASON_MAX_JDAY};

/// Sanity bounds for any recorded lethal temperature, in °C.
pub const LTE_MIN_C: f64 = -60.0;
pub const LTE_MAX_C: f64 = 10.0;

/// Which lethal-temperature percentile is used as the phenotype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum LteLevel {
    Lte10,
    #[default]
    Lte50,
    Lte90,
}

impl LteLevel {
    pub const ALL: [LteLevel; 3] = [LteLevel::Lte10, LteLevel::Lte50, LteLevel::Lte90];

    pub fn percent(self) -> u8 {
        match self {
            LteLevel::Lte10 => 10,
            LteLevel::Lte50 => 50,
            LteLevel::Lte90 => 90,
        }
    }

    pub fn from_percent(p: u8) -> Option<Self> {
        match p {
            10 => Some(LteLevel::Lte10),
            50 => Some(LteLevel::Lte50),
            90 => Some(LteLevel::Lte90),
            _ => None,
        }
    }
}

impl fmt::Display for LteLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LTE{}", self.percent())
    }
}

/// One sampled day for one cultivar in one dormant season.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub cultivar: String,
    pub date: Date,
    pub season: String,
    pub season_jday: u16,
    pub lte10: Option<f64>,
    pub lte50: Option<f64>,
    pub lte90: Option<f64>,
    pub min_air_temp: f64,
    pub avg_air_temp: Option<f64>,
    pub max_air_temp: Option<f64>,
}

impl Observation {
    pub fn lte(&self, level: LteLevel) -> Option<f64> {
        match level {
            LteLevel::Lte10 => self.lte10,
            LteLevel::Lte50 => self.lte50,
            LteLevel::Lte90 => self.lte90,
        }
    }

    fn key(&self) -> (&str, &str, u16) {
        (&self.cultivar, &self.season, self.season_jday)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    observations: Vec<Observation>,
    cultivars: BTreeSet<String>,
    seasons: BTreeSet<String>,
}

impl Dataset {
    pub fn from_observations(observations: Vec<Observation>) -> Self {
        let cultivars = observations.iter().map(|o| o.cultivar.clone()).collect();
        let seasons = observations.iter().map(|o| o.season.clone()).collect();
        Dataset { observations, cultivars, seasons }
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn into_observations(self) -> Vec<Observation> {
        self.observations
    }

    pub fn cultivars(&self) -> &BTreeSet<String> {
        &self.cultivars
    }

    pub fn seasons(&self) -> &BTreeSet<String> {
        &self.seasons
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Concatenates two datasets; run [`validate_dataset`] afterwards to
    /// catch keys present in both.
    pub fn merge(mut self, other: Dataset) -> Dataset {
        self.observations.extend(other.observations);
        Dataset::from_observations(self.observations)
    }

    /// Index of the first observation sharing its (cultivar, season, jday)
    /// key with an earlier one.
    pub fn first_duplicate(&self) -> Option<(usize, usize)> {
        let mut seen: BTreeMap<(&str, &str, u16), usize> = BTreeMap::new();
        for (row, obs) in self.observations.iter().enumerate() {
            if let Some(&first) = seen.get(&obs.key()) {
                return Some((first, row));
            }
            seen.insert(obs.key(), row);
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    DuplicateKey { first_row: usize },
    JdayOutOfRange { jday: u16 },
    JdayMismatch { expected: Option<(String, u16)> },
    LteOutOfBounds { level: LteLevel, value: f64 },
    LteOrdering { warmer: LteLevel, colder: LteLevel },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::DuplicateKey { first_row } => {
                write!(f, "duplicate key (first seen at row {first_row})")
            }
            Rule::JdayOutOfRange { jday } => {
                write!(f, "season jday {jday} outside [{SEASON_FIRST_JDAY}, {SEASON_MAX_JDAY}]")
            }
            Rule::JdayMismatch { expected: Some((season, jday)) } => {
                write!(f, "season/jday disagree with date (expected {season} day {jday})")
            }
            Rule::JdayMismatch { expected: None } => {
                write!(f, "date falls outside the dormant-season window")
            }
            Rule::LteOutOfBounds { level, value } => {
                write!(f, "{level} value {value} outside [{LTE_MIN_C}, {LTE_MAX_C}] °C")
            }
            Rule::LteOrdering { warmer, colder } => {
                write!(f, "LTE ordering ({warmer} must be >= {colder})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Zero-based index into the dataset's observations.
    pub row: usize,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub observation_count: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every observation and dataset invariant. Violations are reported
/// in row order; within a row, in rule order.
pub fn validate_dataset(dataset: &Dataset) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<(&str, &str, u16), usize> = BTreeMap::new();
    for (row, obs) in dataset.observations.iter().enumerate() {
        let mut push = |rule| violations.push(Violation { row, rule });
        match seen.get(&obs.key()) {
            Some(&first_row) => push(Rule::DuplicateKey { first_row }),
            None => {
                seen.insert(obs.key(), row);
            }
        }
        if !(SEASON_FIRST_JDAY..=SEASON_MAX_JDAY).contains(&obs.season_jday) {
            push(Rule::JdayOutOfRange { jday: obs.season_jday });
        }
        let expected = calendar::season_jday(obs.date);
        let consistent = matches!(&expected, Some((s, j)) if *s == obs.season && *j == obs.season_jday);
        if !consistent {
            push(Rule::JdayMismatch { expected });
        }
        for level in LteLevel::ALL {
            if let Some(value) = obs.lte(level) {
                if !(LTE_MIN_C..=LTE_MAX_C).contains(&value) {
                    push(Rule::LteOutOfBounds { level, value });
                }
            }
        }
        for (warmer, colder) in [
            (LteLevel::Lte10, LteLevel::Lte50),
            (LteLevel::Lte50, LteLevel::Lte90),
            (LteLevel::Lte10, LteLevel::Lte90),
        ] {
            if let (Some(w), Some(c)) = (obs.lte(warmer), obs.lte(colder)) {
                if w < c {
                    push(Rule::LteOrdering { warmer, colder });
                }
            }
        }
    }
    ValidationReport { observation_count: dataset.len(), violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabels {
    pub cultivars: Vec<String>,
    pub seasons: Vec<String>,
}

impl fmt::Display for UnknownLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = "";
        if !self.cultivars.is_empty() {
            write!(f, "unknown cultivar(s): {}", self.cultivars.join(", "))?;
            sep = "; ";
        }
        if !self.seasons.is_empty() {
            write!(f, "{sep}unknown season(s): {}", self.seasons.join(", "))?;
        }
        Ok(())
    }
}

impl core::error::Error for UnknownLabels {}

/// Keeps the observations whose cultivar and season both pass; `None`
/// means no restriction on that axis.
pub fn filter(
    dataset: &Dataset,
    cultivars: Option<&[String]>,
    seasons: Option<&[String]>,
) -> Result<Dataset, UnknownLabels> {
    let unknown = |wanted: Option<&[String]>, present: &BTreeSet<String>| -> Vec<String> {
        let mut missing: Vec<String> = wanted
            .unwrap_or(&[])
            .iter()
            .filter(|l| !present.contains(*l))
            .cloned()
            .collect();
        missing.sort();
        missing.dedup();
        missing
    };
    let err = UnknownLabels {
        cultivars: unknown(cultivars, &dataset.cultivars),
        seasons: unknown(seasons, &dataset.seasons),
    };
    if !err.cultivars.is_empty() || !err.seasons.is_empty() {
        return Err(err);
    }
    let keep = |wanted: Option<&[String]>, label: &String| wanted.is_none_or(|w| w.contains(label));
    let observations = dataset
        .observations
        .iter()
        .filter(|o| keep(cultivars, &o.cultivar) && keep(seasons, &o.season))
        .cloned()
        .collect();
    Ok(Dataset::from_observations(observations))
}

/// A point in the normalized (day, risk margin) plane with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: f64,
    pub y: f64,
    pub cultivar: String,
    pub season: String,
    pub raw_jday: u16,
}

impl LabeledPoint {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.season
            .cmp(&other.season)
            .then(self.raw_jday.cmp(&other.raw_jday))
            .then(self.cultivar.cmp(&other.cultivar))
            .then(self.x.total_cmp(&other.x))
            .then(self.y.total_cmp(&other.y))
    }
}

/// Which observations make up one point cloud.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Grouping {
    Cultivar(String),
    Season(String),
}

impl Grouping {
    pub fn label(&self) -> &str {
        match self {
            Grouping::Cultivar(l) | Grouping::Season(l) => l,
        }
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grouping::Cultivar(c) => write!(f, "cultivar={c}"),
            Grouping::Season(s) => write!(f, "season={s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<LabeledPoint>,
    provenance: String,
}

impl PointCloud {
    /// Builds a cloud in canonical order: season, then raw jday, then cultivar.
    pub fn new(mut points: Vec<LabeledPoint>, provenance: impl ToString) -> Self {
        points.sort_by(LabeledPoint::canonical_cmp);
        PointCloud { points, provenance: provenance.to_string() }
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coordinates(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| (p.x, p.y))
    }
}
