//! Risk-margin transform and the two scaling functions that place each
//! observation in the unit plane.
//!
//! The vertical coordinate starts from δ, the daily margin between minimum
//! air temperature and the lethal temperature. Each (cultivar, season)
//! trajectory is rescaled with
//!
//! ```text
//! δ̄ = (δ − min|δ|) / (max|δ| − min|δ|)
//! ```
//!
//! so that long, flat branchings become rounder holes. The horizontal
//! coordinate is the season day mapped linearly from [250, 500] onto [0, 1].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::calendar::{SEASON_FIRST_JDAY, SEASON_LAST_JDAY, SEASON_MAX_JDAY};
use crate::model::{Dataset, Grouping, LabeledPoint, LteLevel, Observation, PointCloud};

/// Operand order for δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaSign {
    /// δ = min air temperature − LTE; positive normally, negative on kill days.
    #[default]
    MinAirMinusLte,
    /// δ = LTE − min air temperature.
    LteMinusMinAir,
}

/// Which days share the min/max statistics of the rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormScope {
    /// One rescaling per (cultivar, season) trajectory.
    #[default]
    CultivarSeason,
    /// One rescaling for the whole group.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssemblyOptions {
    pub level: LteLevel,
    pub sign: DeltaSign,
    pub scope: NormScope,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormalizeError {
    /// max|δ| equals min|δ| over the named scope.
    DegenerateScale { scope: String },
    JdayOutOfRange { jday: u16 },
    EmptyGroup { group: Grouping, level: LteLevel },
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeError::DegenerateScale { scope } => {
                write!(f, "degenerate scale: |delta| is constant over {scope}")
            }
            NormalizeError::JdayOutOfRange { jday } => {
                write!(f, "season jday {jday} outside [{SEASON_FIRST_JDAY}, {SEASON_MAX_JDAY}]")
            }
            NormalizeError::EmptyGroup { group, level } => {
                write!(f, "no observations with {level} for {group}")
            }
        }
    }
}

impl core::error::Error for NormalizeError {}

pub fn compute_delta(observation: &Observation, level: LteLevel) -> Option<f64> {
    compute_delta_with(observation, level, DeltaSign::default())
}

pub fn compute_delta_with(observation: &Observation, level: LteLevel, sign: DeltaSign) -> Option<f64> {
    let lte = observation.lte(level)?;
    Some(match sign {
        DeltaSign::MinAirMinusLte => observation.min_air_temp - lte,
        DeltaSign::LteMinusMinAir => lte - observation.min_air_temp,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEntry {
    pub season: String,
    pub cultivar: String,
    pub raw_jday: u16,
    pub delta: f64,
}

/// δ values that share one rescaling, tagged with the scope they cover.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSeries {
    pub scope: String,
    pub entries: Vec<DeltaEntry>,
}

impl DeltaSeries {
    pub fn normalize(&self) -> Result<Vec<f64>, NormalizeError> {
        let deltas: Vec<f64> = self.entries.iter().map(|e| e.delta).collect();
        normalize_deltas(&deltas).map_err(|_| NormalizeError::DegenerateScale { scope: self.scope.clone() })
    }
}

/// Error from [`normalize_deltas`]: the absolute values have no spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegenerateScale;

impl fmt::Display for DegenerateScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("degenerate scale: |delta| is constant")
    }
}

impl core::error::Error for DegenerateScale {}

/// Rescales δ values by the spread of their absolute values. Output order
/// matches input order.
pub fn normalize_deltas(deltas: &[f64]) -> Result<Vec<f64>, DegenerateScale> {
    let (lo, hi) = deltas
        .iter()
        .map(|d| d.abs())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
    // Also catches the empty series, where lo > hi.
    if !(hi > lo) {
        return Err(DegenerateScale);
    }
    let span = hi - lo;
    Ok(deltas.iter().map(|d| (d - lo) / span).collect())
}

/// Maps a season day onto [0, 1] over the fixed window [250, 500]; day 501
/// is clamped to 1.
pub fn scale_jday(raw_jday: u16) -> Result<f64, NormalizeError> {
    if !(SEASON_FIRST_JDAY..=SEASON_MAX_JDAY).contains(&raw_jday) {
        return Err(NormalizeError::JdayOutOfRange { jday: raw_jday });
    }
    let span = f64::from(SEASON_LAST_JDAY - SEASON_FIRST_JDAY);
    Ok((f64::from(raw_jday - SEASON_FIRST_JDAY) / span).min(1.0))
}

/// Builds the normalized point cloud for one group. Observations lacking
/// the selected LTE level are skipped.
pub fn assemble_point_cloud(
    dataset: &Dataset,
    grouping: &Grouping,
    options: &AssemblyOptions,
) -> Result<PointCloud, NormalizeError> {
    let in_group = |o: &&Observation| match grouping {
        Grouping::Cultivar(c) => o.cultivar == *c,
        Grouping::Season(s) => o.season == *s,
    };

    let mut series: BTreeMap<(String, String), DeltaSeries> = BTreeMap::new();
    for obs in dataset.observations().iter().filter(in_group) {
        let Some(delta) = compute_delta_with(obs, options.level, options.sign) else {
            continue;
        };
        let key = match options.scope {
            NormScope::CultivarSeason => (obs.cultivar.clone(), obs.season.clone()),
            NormScope::Pooled => (String::new(), String::new()),
        };
        let entry = series.entry(key).or_insert_with_key(|(c, s)| DeltaSeries {
            scope: match options.scope {
                NormScope::CultivarSeason => format!("cultivar {c}, season {s}"),
                NormScope::Pooled => format!("{grouping}"),
            },
            entries: Vec::new(),
        });
        entry.entries.push(DeltaEntry {
            season: obs.season.clone(),
            cultivar: obs.cultivar.clone(),
            raw_jday: obs.season_jday,
            delta,
        });
    }
    if series.is_empty() {
        return Err(NormalizeError::EmptyGroup { group: grouping.clone(), level: options.level });
    }

    let mut points = Vec::new();
    for s in series.values_mut() {
        // Row order of the dataset must not leak into the rescaling.
        s.entries.sort_by(|a, b| {
            (&a.season, a.raw_jday, &a.cultivar)
                .cmp(&(&b.season, b.raw_jday, &b.cultivar))
                .then(a.delta.total_cmp(&b.delta))
        });
        let ys = s.normalize()?;
        for (e, y) in s.entries.iter().zip(ys) {
            points.push(LabeledPoint {
                x: scale_jday(e.raw_jday)?,
                y,
                cultivar: e.cultivar.clone(),
                season: e.season.clone(),
                raw_jday: e.raw_jday,
            });
        }
    }
    let provenance = format!(
        "{grouping};{};sign={};scope={}",
        options.level,
        match options.sign {
            DeltaSign::MinAirMinusLte => "min_air-lte",
            DeltaSign::LteMinusMinAir => "lte-min_air",
        },
        match options.scope {
            NormScope::CultivarSeason => "cultivar-season",
            NormScope::Pooled => "pooled",
        }
    );
    Ok(PointCloud::new(points, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::{self, Date};
    use alloc::vec;

    fn obs(cultivar: &str, date: &str, lte50: Option<f64>, min_at: f64) -> Observation {
        let date = Date::parse_iso(date).unwrap();
        let (season, season_jday) = calendar::season_jday(date).unwrap();
        Observation {
            cultivar: cultivar.into(),
            date,
            season,
            season_jday,
            lte10: None,
            lte50,
            lte90: None,
            min_air_temp: min_at,
            avg_air_temp: None,
            max_air_temp: None,
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(compute_delta(&obs("CS", "2017-12-01", Some(-22.0), -2.0), LteLevel::Lte50), Some(20.0));
        assert_eq!(compute_delta(&obs("CS", "2017-12-01", Some(-22.0), -25.0), LteLevel::Lte50), Some(-3.0));
        assert_eq!(compute_delta(&obs("CS", "2017-12-01", None, -2.0), LteLevel::Lte50), None);
        assert_eq!(
            compute_delta_with(&obs("CS", "2017-12-01", Some(-22.0), -2.0), LteLevel::Lte50, DeltaSign::LteMinusMinAir),
            Some(-20.0)
        );
    }

    #[test]
    fn rescaling_examples() {
        // min|δ| = 2, max|δ| = 10, span 8.
        assert_eq!(normalize_deltas(&[2.0, 4.0, 10.0]).unwrap(), vec![0.0, 0.25, 1.0]);
        // min|δ| = 1, max|δ| = 5, span 4; negative δ lands below zero.
        assert_eq!(normalize_deltas(&[-1.0, 3.0, 5.0]).unwrap(), vec![-0.5, 0.5, 1.0]);
        assert_eq!(normalize_deltas(&[7.0, 7.0, 7.0]), Err(DegenerateScale));
        assert_eq!(normalize_deltas(&[7.0]), Err(DegenerateScale));
        assert_eq!(normalize_deltas(&[]), Err(DegenerateScale));
        assert_eq!(normalize_deltas(&[-3.0, 3.0]), Err(DegenerateScale));
    }

    #[test]
    fn jday_scaling() {
        assert_eq!(scale_jday(250).unwrap(), 0.0);
        assert_eq!(scale_jday(500).unwrap(), 1.0);
        assert_eq!(scale_jday(375).unwrap(), 0.5);
        assert_eq!(scale_jday(501).unwrap(), 1.0);
        assert_eq!(scale_jday(249), Err(NormalizeError::JdayOutOfRange { jday: 249 }));
        assert_eq!(scale_jday(502), Err(NormalizeError::JdayOutOfRange { jday: 502 }));
    }

    fn lte_for(delta: f64, min_at: f64) -> Option<f64> {
        Some(min_at - delta)
    }

    #[test]
    fn assembles_composed_example() {
        // jdays 250, 375, 500 of 2017-2018 with δ = 2, 4, 10.
        let ds = Dataset::from_observations(vec![
            obs("CS", "2018-05-15", lte_for(10.0, -1.0), -1.0),
            obs("CS", "2017-09-07", lte_for(2.0, 5.0), 5.0),
            obs("CS", "2018-01-10", lte_for(4.0, -6.0), -6.0),
        ]);
        assert_eq!(ds.observations()[2].season_jday, 375);
        let cloud = assemble_point_cloud(&ds, &Grouping::Cultivar("CS".into()), &AssemblyOptions::default()).unwrap();
        let pts: Vec<_> = cloud.coordinates().collect();
        assert_eq!(pts, vec![(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]);
        assert!(cloud.provenance().starts_with("cultivar=CS;LTE50"));
    }

    #[test]
    fn grouping_contracts() {
        let mut rows = Vec::new();
        for (i, c) in ["CD", "CH", "CS", "MR", "WR"].iter().enumerate() {
            rows.push(obs(c, "2017-10-01", Some(-10.0 - i as f64), 0.0));
            rows.push(obs(c, "2017-12-01", Some(-20.0), -1.0));
            rows.push(obs(c, "2018-10-01", Some(-12.0), 0.0));
            rows.push(obs(c, "2018-12-01", Some(-22.0), -3.0));
        }
        let ds = Dataset::from_observations(rows);
        let opts = AssemblyOptions::default();
        let by_season = assemble_point_cloud(&ds, &Grouping::Season("2017-2018".into()), &opts).unwrap();
        let cultivars: alloc::collections::BTreeSet<_> = by_season.points().iter().map(|p| p.cultivar.as_str()).collect();
        assert_eq!(cultivars.len(), 5);
        let by_cultivar = assemble_point_cloud(&ds, &Grouping::Cultivar("CS".into()), &opts).unwrap();
        let seasons: alloc::collections::BTreeSet<_> = by_cultivar.points().iter().map(|p| p.season.as_str()).collect();
        assert_eq!(seasons.into_iter().collect::<Vec<_>>(), vec!["2017-2018", "2018-2019"]);
    }

    #[test]
    fn degenerate_subseries_is_named() {
        let ds = Dataset::from_observations(vec![
            obs("CS", "2017-10-01", Some(-10.0), 0.0),
            obs("CS", "2017-12-01", Some(-20.0), -1.0),
            obs("CS", "2018-10-01", Some(-12.0), 0.0),
        ]);
        let err = assemble_point_cloud(&ds, &Grouping::Cultivar("CS".into()), &AssemblyOptions::default()).unwrap_err();
        assert_eq!(err, NormalizeError::DegenerateScale { scope: "cultivar CS, season 2018-2019".into() });
        // Pooling over the cultivar rescues the lone day.
        let pooled = AssemblyOptions { scope: NormScope::Pooled, ..Default::default() };
        assert_eq!(assemble_point_cloud(&ds, &Grouping::Cultivar("CS".into()), &pooled).unwrap().len(), 3);
    }

    #[test]
    fn empty_group_errors() {
        let ds = Dataset::from_observations(vec![obs("CS", "2017-10-01", None, 0.0)]);
        let err = assemble_point_cloud(&ds, &Grouping::Cultivar("CS".into()), &AssemblyOptions::default()).unwrap_err();
        assert!(matches!(err, NormalizeError::EmptyGroup { .. }));
        let err = assemble_point_cloud(&ds, &Grouping::Cultivar("MR".into()), &AssemblyOptions::default()).unwrap_err();
        assert!(matches!(err, NormalizeError::EmptyGroup { .. }));
    }
}
