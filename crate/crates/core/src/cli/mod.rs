//! Configuration, experiment orchestration and the `psystem` command line.

mod args;
mod commands;
mod config;
mod experiment;

pub use args::{run_cli, Cli, Command};
pub use commands::{
    cmd_check_forcing, cmd_profile, cmd_simulate, cmd_verify, exit_code, forcing_checks, gnuplot_script,
    load_config, parse_t_samples, read_snapshot, write_snapshot, SimulateReport, EXIT_BLOW_UP, EXIT_IO, EXIT_OK,
    EXIT_VALIDATION,
};
pub use config::{
    parse_config, DampingSection, ExperimentConfig, GridSection, InitSection, OutputSection, PressureSection,
    ProfileSection, ShapeKind, TimeSection, VerifySection, FITTED_COLUMNS,
};
pub use experiment::{
    config_expectations, default_expectations, prepare, run_prepared, similarity_options, solve_profile,
    verify_series, Prepared, RunOutcome,
};
