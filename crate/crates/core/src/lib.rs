//! Numerical laboratory for curvature comparison theorems on rotationally
//! symmetric weighted model spaces.
//!
//! The crate builds one-dimensional model functions from a curvature lower
//! bound profile, assembles warped-product models carrying a radial weight,
//! and checks the comparison inequalities (curvature hypothesis, Riccati and
//! Laplacian comparison, volume monotonicity), the maximal-diameter rigidity
//! classification and the completeness-based compactness criterion against
//! them.

pub mod numerics;
pub mod parameters;
pub mod model_functions;
pub mod model_space;
pub mod comparison;
pub mod rigidity;
pub mod compactness;
pub mod config;

pub use model_functions::{solve_model, KappaProfile, ModelFnError, ModelFunctions};
pub use model_space::{EqualityWarp, ModelError, RadialFunction, Weight, WeightedModel};
pub use parameters::{
    base_point_constant, validate_range, CpMode, EpsParams, ExtendedN, ParamError,
};
