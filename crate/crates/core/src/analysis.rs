//! End-to-end group comparisons: per-group diagrams, divergence matrices,
//! branching events and matrix summaries.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::metrics::{self, LabeledDistanceMatrix, MatchingConfig, MetricError};
use crate::model::{Dataset, Grouping, PointCloud};
use crate::normalize::{self, AssemblyOptions, NormalizeError};
use crate::persistence::{self, PersistenceDiagram, PersistenceError};

/// Default persistence cut-off for branching events, in normalized units.
pub const DEFAULT_MIN_PERSISTENCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupKind {
    Cultivar,
    Season,
}

impl GroupKind {
    pub fn grouping(self, key: &str) -> Grouping {
        match self {
            GroupKind::Cultivar => Grouping::Cultivar(key.into()),
            GroupKind::Season => Grouping::Season(key.into()),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Cultivar => "cultivar",
            GroupKind::Season => "season",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub assembly: AssemblyOptions,
    /// Rips threshold; `None` uses each cloud's enclosing radius.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    UnknownKey { kind: GroupKind, key: String },
    TooFewKeys(usize),
    Assembly { key: String, source: NormalizeError },
    Persistence { key: String, source: PersistenceError },
    Metric(MetricError),
    ProvenanceMismatch { diagram: String, cloud: String },
    TooFewLabels(usize),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::UnknownKey { kind, key } => write!(f, "unknown {kind} {key:?}"),
            AnalysisError::TooFewKeys(n) => write!(f, "need at least 2 keys to compare, got {n}"),
            AnalysisError::Assembly { key, source } => write!(f, "{key}: {source}"),
            AnalysisError::Persistence { key, source } => write!(f, "{key}: {source}"),
            AnalysisError::Metric(e) => write!(f, "{e}"),
            AnalysisError::ProvenanceMismatch { diagram, cloud } => {
                write!(f, "diagram ({diagram}) was not computed from this point cloud ({cloud})")
            }
            AnalysisError::TooFewLabels(n) => write!(f, "need at least 2 labels to summarize, got {n}"),
        }
    }
}

impl core::error::Error for AnalysisError {}

impl From<MetricError> for AnalysisError {
    fn from(e: MetricError) -> Self {
        AnalysisError::Metric(e)
    }
}

/// A group's point cloud and the diagram computed from it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDiagram {
    pub label: String,
    pub cloud: PointCloud,
    pub diagram: PersistenceDiagram,
}

pub fn group_diagrams(
    dataset: &Dataset,
    kind: GroupKind,
    keys: &[String],
    options: &AnalysisOptions,
) -> Result<Vec<GroupDiagram>, AnalysisError> {
    keys.iter()
        .map(|key| {
            let present = match kind {
                GroupKind::Cultivar => dataset.cultivars().contains(key),
                GroupKind::Season => dataset.seasons().contains(key),
            };
            if !present {
                return Err(AnalysisError::UnknownKey { kind, key: key.clone() });
            }
            let cloud = normalize::assemble_point_cloud(dataset, &kind.grouping(key), &options.assembly)
                .map_err(|source| AnalysisError::Assembly { key: key.clone(), source })?;
            let diagram = persistence::cloud_persistence(&cloud, options.threshold)
                .map_err(|source| AnalysisError::Persistence { key: key.clone(), source })?;
            Ok(GroupDiagram { label: key.clone(), cloud, diagram })
        })
        .collect()
}

/// Wasserstein distances between the groups' diagrams, essential classes
/// removed.
pub fn divergence_matrix(
    dataset: &Dataset,
    kind: GroupKind,
    keys: &[String],
    options: &AnalysisOptions,
    cfg: &MatchingConfig,
) -> Result<LabeledDistanceMatrix, AnalysisError> {
    if keys.len() < 2 {
        return Err(AnalysisError::TooFewKeys(keys.len()));
    }
    let groups = group_diagrams(dataset, kind, keys, options)?;
    let diagrams: Vec<(String, PersistenceDiagram)> =
        groups.into_iter().map(|g| (g.label, g.diagram.without_essential())).collect();
    Ok(metrics::pairwise_diagram_matrix(&diagrams, cfg)?)
}

/// A hole localized to the days and seasons of its representative cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingEvent {
    pub birth: f64,
    pub death: f64,
    pub persistence: f64,
    pub jday_start: u16,
    pub jday_end: u16,
    pub seasons: BTreeSet<String>,
    pub cultivars: BTreeSet<String>,
    /// Cycle edges as point indices into the cloud.
    pub representative: Vec<(usize, usize)>,
}

/// One event per dimension-1 pair with persistence at least
/// `min_persistence`, most persistent first.
///
/// The intervals come from the cycle the reduction produced, which need not
/// be the shortest cycle around the hole, so they can over-cover.
pub fn branching_events(
    diagram: &PersistenceDiagram,
    cloud: &PointCloud,
    min_persistence: f64,
) -> Result<Vec<BranchingEvent>, AnalysisError> {
    let mismatch = || AnalysisError::ProvenanceMismatch {
        diagram: diagram.provenance.clone(),
        cloud: cloud.provenance().into(),
    };
    if diagram.provenance != cloud.provenance() {
        return Err(mismatch());
    }
    let points = cloud.points();
    let mut events = Vec::new();
    for pair in diagram.dgm1() {
        let persistence = pair.persistence();
        if !(persistence >= min_persistence) || !(persistence > 0.0) {
            continue;
        }
        let representative = pair.representative.clone().unwrap_or_default();
        let vertices: BTreeSet<usize> = representative.iter().flat_map(|&(a, b)| [a, b]).collect();
        if vertices.is_empty() || vertices.iter().any(|&v| v >= points.len()) {
            return Err(mismatch());
        }
        let jdays = vertices.iter().map(|&v| points[v].raw_jday);
        events.push(BranchingEvent {
            birth: pair.birth,
            death: pair.death,
            persistence,
            jday_start: jdays.clone().min().unwrap_or_default(),
            jday_end: jdays.max().unwrap_or_default(),
            seasons: vertices.iter().map(|&v| points[v].season.clone()).collect(),
            cultivars: vertices.iter().map(|&v| points[v].cultivar.clone()).collect(),
            representative,
        });
    }
    events.sort_by(|a, b| b.persistence.total_cmp(&a.persistence));
    Ok(events)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelPair {
    pub a: String,
    pub b: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSummary {
    /// Mean of each row's off-diagonal entries, in matrix label order.
    pub row_means: Vec<(String, f64)>,
    pub global_mean: f64,
    /// Label with the largest row mean.
    pub max_row_mean: (String, f64),
    pub max_pair: LabelPair,
    pub min_pair: LabelPair,
}

/// Means and extremes of the off-diagonal entries.
///
/// Sums run over labels in lexicographic order and pairs are reported with
/// labels in lexicographic order, so the summary does not depend on how the
/// matrix rows happen to be arranged. Ties go to the lexicographically
/// smallest pair.
pub fn summarize_matrix(matrix: &LabeledDistanceMatrix) -> Result<MatrixSummary, AnalysisError> {
    let n = matrix.len();
    if n < 2 {
        return Err(AnalysisError::TooFewLabels(n));
    }
    let labels = matrix.labels();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| labels[i].cmp(&labels[j]));

    let mut total = 0.0;
    let mut max_pair: Option<LabelPair> = None;
    let mut min_pair: Option<LabelPair> = None;
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            let value = matrix.get(i, j);
            total += value;
            let pair = || LabelPair { a: labels[i].clone(), b: labels[j].clone(), value };
            if max_pair.as_ref().is_none_or(|m| value > m.value) {
                max_pair = Some(pair());
            }
            if min_pair.as_ref().is_none_or(|m| value < m.value) {
                min_pair = Some(pair());
            }
        }
    }
    let row_means: Vec<(String, f64)> = (0..n)
        .map(|i| {
            let sum: f64 = order.iter().filter(|&&j| j != i).map(|&j| matrix.get(i, j)).sum();
            (labels[i].clone(), sum / (n - 1) as f64)
        })
        .collect();
    let max_row_mean = order
        .iter()
        .map(|&i| &row_means[i])
        .fold(None::<&(String, f64)>, |best, r| match best {
            Some(b) if b.1 >= r.1 => Some(b),
            _ => Some(r),
        })
        .cloned()
        .unwrap_or_default();
    Ok(MatrixSummary {
        row_means,
        global_mean: total / (n * (n - 1) / 2) as f64,
        max_row_mean,
        max_pair: max_pair.unwrap_or_else(|| unreachable!("n >= 2")),
        min_pair: min_pair.unwrap_or_else(|| unreachable!("n >= 2")),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariabilityProfile {
    pub hole_count: usize,
    /// Persistence of every dimension-1 pair, largest first.
    pub persistences: Vec<f64>,
}

pub fn variability_profile(diagram: &PersistenceDiagram) -> VariabilityProfile {
    let mut persistences: Vec<f64> = diagram.dgm1().map(|p| p.persistence()).collect();
    persistences.sort_by(|a, b| b.total_cmp(a));
    VariabilityProfile { hole_count: persistences.len(), persistences }
}
