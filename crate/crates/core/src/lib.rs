//! Unit current flows on finite rooted networks, the path measures they
//! induce, and intersection statistics of independent path pairs.
//!
//! The pipeline is: build a [`Network`] (usually a wired exhaustion of an
//! infinite graph family), solve for its unit current [`Flow`], turn the flow
//! into a [`PathKernel`] whose walks are simple root-to-sink paths, and
//! measure how many edges and vertices two independent paths share.

pub mod error;
pub mod graph;
pub mod intersection;
pub mod measure;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use graph::{exhaustion, GraphFamily, Network};
pub use intersection::{IntersectionReport, ScanTable};
pub use measure::{PathKernel, SimplePath, VisitProfile};
pub use solver::{Flow, Potential, DEFAULT_TOL, EPS_FLOW};
