//! Core domain types: constitutive law, damping coefficient, end states,
//! grid and the evolving flow state.

mod damping;
mod grid;
mod pressure;
mod state;

pub use damping::{Bump, DampingField, DampingShape, IntegrabilityReport, SUPPORT_TOLERANCE};
pub use grid::Grid1D;
pub use pressure::PressureLaw;
pub use state::{EndStates, FlowState};
