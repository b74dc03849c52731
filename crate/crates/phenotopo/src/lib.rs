//! File formats, plots and the command line around `phenotopo-core`.
//!
//! [`ingest`] reads the merged weather and cold-hardiness CSV into a
//! [`phenotopo_core::Dataset`] and writes the canonical dump back out;
//! [`formats`] holds the diagram, matrix, event and summary encodings;
//! [`svg`] draws persistence diagrams and branching-event overlays; [`cli`]
//! wires them into the `phenotopo` binary.

pub mod cli;
pub mod formats;
pub mod ingest;
pub mod svg;
