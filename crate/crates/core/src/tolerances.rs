//! Default numeric tolerances. The CLI exposes each of these as a flag.

/// Largest supported number of generators.
pub const ALGEBRA_CAP: usize = 12;
/// Absolute per-blade bound for declaring a polynomial zero.
pub const POLY_ZERO: f64 = 1e-12;
/// Coefficients below this fraction of the summands are cancellation noise.
pub const CANCEL_REL: f64 = 1e-13;
/// Relative tolerance for orbit membership.
pub const ORBIT_REL: f64 = 1e-12;
/// Relative tolerance used to accept a unit 1-vector.
pub const UNIT_REL: f64 = 1e-12;
/// Pole detection for the slice Cauchy kernel, scaled by 1 + |y|.
pub const POLE_REL: f64 = 1e-12;
/// Default degree cap for Fueter polynomials.
pub const FUETER_DEGREE_CAP: u32 = 8;
/// Finite difference step and Richardson levels for conformal checks.
pub const FD_STEP: f64 = 1e-5;
/// Cauchy reproduction tolerance, scaled by 1 + |f(x)|.
pub const CAUCHY_REL: f64 = 1e-8;
/// Cocycle / orbit preservation checks.
pub const MOBIUS_REL: f64 = 1e-10;
/// Finite-difference monogenicity residual.
pub const FD_RESIDUAL: f64 = 1e-6;
/// Minimum distance to the boundary, in node spacings.
pub const INTERIOR_SPACINGS: f64 = 3.0;
/// Default resolutions.
pub const CIRCLE_NODES: usize = 64;
pub const SPHERE_THETA: usize = 32;
pub const SPHERE_PHI: usize = 64;
pub const RADIAL_NODES: usize = 32;
