//! Small numerical building blocks shared by the profile, solver and
//! diagnostics modules.

pub mod hermite;
pub mod jet;
pub mod ode;
pub mod quad;
