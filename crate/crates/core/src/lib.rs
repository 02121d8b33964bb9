//! Graph-native normalization of labeled property graphs.

pub mod cli;
pub mod error;
pub mod gofd;
pub mod graph;
pub mod metrics;
pub mod normalize;
pub mod normalform;
pub mod parser;
pub mod pattern;
pub mod skolem;
pub mod transform;

pub use error::{Error, Result};
pub use gofd::{DepClass, Descriptor, GnSchema, GoFd};
pub use graph::{Graph, ObjectId, Value};
pub use pattern::{Direction, GraphPattern, ObjectKind, ObjectPattern, Relation, Variable};
