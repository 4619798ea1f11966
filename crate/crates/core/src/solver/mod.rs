//! First-order Rusanov finite volumes for the p-system, Strang-split with the
//! exact solution of `u_t = -alpha u`.

mod initial;
mod scheme;

pub use initial::{InitialData, InitialKind};
pub use scheme::{
    damping_substep, hyperbolic_flux, max_wave_speed, Boundary, RunSummary, Solver, SolverConfig, StepInfo,
};
