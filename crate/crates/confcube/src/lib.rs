//! Simultaneous confidence cubes for the four cell means of a 2x2 factorial
//! experiment, exploiting uncertain prior information that the two-factor
//! interaction is zero.
//!
//! The library constructs three kinds of cube from observed data:
//!
//! * the **standard** cube built from the studentized-maximum-modulus
//!   constant,
//! * the **naive** cube obtained after a preliminary t-test of zero
//!   interaction (a baseline with poor minimum coverage), and
//! * the **new** cube `J(b, s)` whose center-shift function `b` and
//!   half-width function `s` are cubic splines optimized so that the cube is
//!   small when the interaction really is zero while minimum coverage stays
//!   at the nominal level.
//!
//! Coverage probability and scaled expected volume are evaluated by nested
//! Gauss-Legendre quadrature of closed-form integrands and can be
//! cross-checked against a direct Monte Carlo simulation of the defining
//! probability.

pub mod constants;
pub mod cube;
pub mod error;
pub mod mc;
pub mod optimizer;
pub mod perf;
pub mod stats;
pub mod tuning;

pub use error::Error;
