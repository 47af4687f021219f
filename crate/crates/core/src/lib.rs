//! Continuous Steiner symmetrization of sampled nonnegative functions, with
//! numerical checks of its rearrangement properties and of local symmetry for
//! solutions of quasilinear elliptic problems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod cst;
pub mod error;
pub mod exemplar;
pub mod field;
pub mod grid;
pub mod interval;
pub mod lemmas;
pub mod nonlinearity;
pub mod pde;
pub mod properties;
pub mod report;
pub mod sgf;
pub mod symmetry;

pub use cst::{
    cst, cst_section, cst_superlevel_mask, cst_with_levels, steiner_section, steiner_symmetrize,
    superlevel_set, truncate, LevelLadder, SectionProfile, DEFAULT_LEVELS,
};
pub use error::{Error, Result};
pub use grid::{GridGeometry, SampledGridFunction};
pub use interval::{collision_time, Interval, IntervalUnion, MergeEvent, Openness};
pub use exemplar::{ExemplarParams, Variant};
pub use field::{GridField, ScalarField};
pub use nonlinearity::NonlinearityPair;
pub use report::PropertyReport;
pub use properties::Settings;
pub use symmetry::{AnnularDecomposition, Annulus, SymmetryVerdict};
