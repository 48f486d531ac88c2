use thiserror::Error;

use crate::lattice::Point;
use crate::maps::SelfMap;

pub type Result<T, E = FreezeError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum FreezeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("adjacency parameter u={u} out of range for dimension {dim} (need 1 <= u <= {dim})")]
    AdjacencyOutOfRange { u: usize, dim: usize },

    #[error("dimension {dim} is not supported (must be between 1 and {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("digital image must contain at least one point")]
    EmptyImage,

    #[error("point {0} is not in the image")]
    PointNotInImage(Point),

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("image mismatch: {0}")]
    ImageMismatch(String),

    #[error("search space of {size} points exceeds the size guard of {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("image is not c_{u}-connected")]
    NotConnected { u: usize },

    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("{q} is not a close neighbor of {p}")]
    NotCloseNeighbor { p: Point, q: Point },

    #[error("{0} is not a boundary point of the cube")]
    NotOnBoundary(Point),

    #[error("axis {axis} is not extremal at {point}")]
    AxisNotExtremal { point: Point, axis: usize },

    #[error("set is not a freezing set")]
    NotFrozen { witness: Box<SelfMap> },

    #[error("search inconclusive: node budget of {budget} exhausted after {nodes} nodes")]
    Inconclusive { nodes: u64, budget: u64 },
}
