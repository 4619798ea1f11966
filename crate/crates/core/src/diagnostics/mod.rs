//! Norms, forcing terms, decay fits and energy monitoring of simulated runs.

mod energy;
mod fit;
mod forcing;
mod norms;
mod phi;
mod series;

pub use energy::{energy_functional, Case, EnergyFamily, EnergyParts, EnergySeries, DELTA_CAP_FACTOR, RESOLUTION_TOLERANCE};
pub use fit::{
    decay_fit, fit_power_law, format_report, write_report_csv, DecayFit, Expectation, FitVerdict, MIN_FIT_SAMPLES,
};
pub use forcing::{
    forcing_decay_check, forcing_f, forcing_g, log_spaced, ForcingCheck, ForcingFields, ForcingNorms, F_BOUNDS,
    FORCING_SLOPE_TOLERANCE, G_BOUNDS,
};
pub use norms::{discrete_norm, first_difference, linf, second_difference, sq_l2, NormKind};
pub use phi::{deviations, mass_defect, phi_reconstruct, time_derivatives, PhiTimeDerivs};
pub use series::{series_columns, DiagnosticsSeries, SeriesBuilder};
