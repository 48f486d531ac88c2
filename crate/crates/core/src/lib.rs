//! Freezing sets for finite digital images.
//!
//! A digital image is a finite set `X ⊂ Z^n` with a `c_u` adjacency. A subset
//! `A ⊆ X` is a *freezing set* when every digitally continuous self-map of
//! `X` that fixes `A` pointwise is the identity.
//!
//! The crate builds candidate freezing sets from cube structure (corner sets
//! under `c_1`, boundaries under `c_n`, unions over cube decompositions),
//! computes the points every freezing set must contain, produces explicit
//! non-identity maps certifying that a set does not freeze, and decides the
//! question in general by pruned search over continuous self-maps.
//!
//! ```
//! use std::sync::Arc;
//! use freeze_core::{CubeSpec, Point, verify_freezing};
//!
//! let cube = CubeSpec::new(vec![0, 0, 0], vec![1, 1, 1]).unwrap();
//! let x = Arc::new(cube.to_image(1).unwrap());
//! let a = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]].map(Point::from);
//! assert!(verify_freezing(&x, &a).unwrap().is_frozen());
//! ```

pub mod construct;
pub mod error;
pub mod lattice;
pub mod maps;
pub mod verify;

pub use construct::{
    boundary_minimality_witness, c1_freezing_set, close_neighbor_witness, cn_freezing_set,
    corners, mandatory_points, trivial_decomposition, validate_decomposition, CubeDecomposition,
    CubeSpec,
};
pub use error::{FreezeError, Result};
pub use lattice::{adjacent, projection, DigitalImage, PathCount, PathResult, Point};
pub use maps::{
    apply_iso, apply_iso_to_set, compose, enumerate_continuous_selfmaps, normalize_to_origin,
    ImageMap, LatticeIso, SelfMap,
};
pub use verify::{
    greedy_minimize, is_minimal_freezing, is_minimal_freezing_with, oracle_verify,
    verify_freezing, verify_freezing_with, FreezeStatus, PruneRule, PruneRules, SearchStats,
    VerifyConfig, VerifyOutcome,
};
