//! Exact wavefront tracking for scalar conservation laws with a general flux,
//! plus wave tracing and a forward-in-time quadratic interaction potential.
//!
//! Everything is computed in exact rational arithmetic. The pipeline is
//! [`envelope::sample_flux`] → [`tracker::discretize_initial`] →
//! [`tracker::evolve`] → [`tracing::trace`] → [`potential::verify_run`].

pub mod envelope;
pub mod potential;
pub mod rational;
pub mod riemann;
pub mod tracing;
pub mod tracker;

pub use envelope::{
    concave_envelope, convex_envelope, curvature_constant, rh_speed, sample_flux, slope_at,
    CurvatureConstant, FluxSpec, GridFlux, Orientation, PiecewiseLinearFn, Side,
};
pub use rational::Rational;
pub use riemann::{is_admissible, solve_riemann, Front};
pub use tracker::{evolve, DatumSpec, InteractionEvent, InteractionKind, Profile, Timeline};
