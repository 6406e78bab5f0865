//! Distances between rooted, leaf-labeled, edge-weighted trees.
//!
//! The centerpiece is the geodesic distance in the space of phylogenetic
//! trees, computed by the GTP algorithm on top of a bipartite max-flow
//! engine. Around it sit the split calculus (canonical order, compatibility,
//! split-vector encoding) and the classic comparison metrics.

pub mod batch;
pub mod bits;
pub mod error;
pub mod geodesic;
pub mod maxflow;
pub mod metrics;
pub mod oracle;
pub mod random;
pub mod splits;
pub mod tree;

pub use bits::LabelBits;
pub use error::{Error, Result};
pub use splits::{Split, SplitVector};
pub use tree::Tree;
