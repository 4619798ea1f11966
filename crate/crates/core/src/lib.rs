//! Numerical laboratory for the p-system with space-dependent damping
//!
//! ```text
//! v_t - u_x = 0,    u_t + p(v)_x = -alpha(x) u
//! ```
//!
//! with diffusion-wave and self-similar asymptotic profiles, a first-order
//! finite-volume solver, and decay-rate diagnostics.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod math;
pub mod models;
pub mod profiles;
pub mod solver;

pub use error::{Error, Result};
