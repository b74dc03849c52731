//! Persistent-homology kernels for finding divergent behaviour in labelled
//! phenotype point clouds.
//!
//! Observations of a phenotype (a lethal temperature) over the dormant
//! season are turned into plane points (season day, rescaled risk margin),
//! grouped by cultivar or season. Each group gets a Vietoris-Rips
//! persistence diagram; groups are compared by Wasserstein distance between
//! their dimension-1 diagrams, and each hole is traced back to the days and
//! seasons on its representative cycle.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, plotting and
//! the command line live in the `phenotopo` crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod assignment;
pub mod calendar;
pub mod metrics;
pub mod model;
pub mod normalize;
pub mod persistence;

pub use analysis::{
    branching_events, divergence_matrix, group_diagrams, summarize_matrix, variability_profile, AnalysisError,
    AnalysisOptions, BranchingEvent, GroupDiagram, GroupKind, LabelPair, MatrixSummary, VariabilityProfile,
};
pub use calendar::{season_jday, Date, DateError};
pub use metrics::{
    pairwise_diagram_matrix, wasserstein_distance, Ground, LabeledDistanceMatrix, MatchingConfig, MatrixError,
    MetricError,
};
pub use model::{
    filter, validate_dataset, Dataset, Grouping, LabeledPoint, LteLevel, Observation, PointCloud, Rule,
    UnknownLabels, ValidationReport, Violation,
};
pub use normalize::{
    assemble_point_cloud, compute_delta, normalize_deltas, scale_jday, AssemblyOptions, DeltaSign, NormScope,
    NormalizeError,
};
pub use persistence::{
    cloud_persistence, enclosing_radius, euclidean_distances, pairwise_distances, rips_persistence,
    PersistenceDiagram, PersistenceError, PersistencePair, SquareDistanceMatrix,
};
