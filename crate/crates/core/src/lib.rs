//! Visibility graphs of sliding time-series windows.
//!
//! The online builders ([`OnlineState`]) keep the natural or horizontal
//! visibility graph of the latest `N` samples up to date in O(N) per tick:
//! the evicted node is removed in place from an adjacency-set graph keyed by
//! absolute tick, and the new tick is connected by one backward walk over
//! the window. Offline builders ([`basic_build`], [`dc_build`],
//! [`lt_build_hvg`]) construct a window's graph from scratch; the quadratic
//! [`basic_build`] is the reference every other builder is tested against.

pub mod bench;
pub mod criteria;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod offline;
pub mod online;

pub use bench::{
    run_benchmark, verify_equivalence, Algorithm, BenchConfig, EquivalenceReport, NamedSeries,
    SlidingBuilder,
};
pub use criteria::{basic_build, horizontal_visible, natural_visible, CriterionKind};
pub use error::{Error, Result};
pub use gen::{generate, GeneratorKind, GeneratorSpec};
pub use graph::{Edge, GraphDelta, Sample, TickIndex, VisibilityGraph, Window};
pub use io::{Measure, TimingRecord};
pub use offline::{bootstrap, dc_build, lt_build_hvg, BootstrapChoice};
pub use online::{OnlineAlgorithm, OnlineState};
