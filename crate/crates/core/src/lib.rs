//! Cayley graph balls, exact minor search with checkable certificates,
//! finite-scale end analysis and the construction of clique minors from
//! disjoint rays in boosted Cayley graphs.

pub mod cayley;
pub mod construction;
pub mod ends;
pub mod generate;
pub mod graph;
pub mod group;
pub mod minor;

pub use cayley::{build_ball, Ball, BallError};
pub use graph::{Graph, GraphError};
pub use group::{power_union, Element, GenSet, GroupError, GroupModel};
pub use minor::{find_minor, verify_embedding, Budget, MinorEmbedding, MinorError, MinorOutcome};
