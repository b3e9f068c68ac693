//! Hyperbolic surface-group representations into the dual affine group,
//! their invariant Jordan curves and the flag dynamics on the complement.

pub mod algebra;
pub mod curve;
pub mod deformation;
pub mod foliation;
pub mod numfmt;
pub mod representation;
pub mod words;

pub use algebra::{AffDualMap, EigenPair2, Mat2, Mat3, ProjLine, ProjPoint};
pub use representation::{HyperbolicityReport, Representation};
pub use words::{Letter, PackedWord, Word};
