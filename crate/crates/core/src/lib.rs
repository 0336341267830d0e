//! Distributional products of piecewise smooth functions with Dirac deltas,
//! interface conditions for fourth-order equations with singular
//! coefficients, and natural frequencies of a cracked stepped beam.

pub mod algebra_check;
pub mod beam;
pub mod dist;
pub mod interface;
pub mod linalg;
pub mod smooth;

pub use beam::{BeamError, BeamModel, BoundaryCondition, Mode, ScanOptions};
pub use dist::{AlgebraError, DeltaTerm, DistributionA};
pub use interface::{CoeffSet, InterfaceError, InterfaceMatrices};
pub use smooth::SmoothExpr;
