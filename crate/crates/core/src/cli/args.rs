use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::commands::{
    cmd_check_forcing, cmd_profile, cmd_simulate, cmd_verify, exit_code, load_config, parse_t_samples,
};
use crate::diagnostics::Expectation;

#[derive(Debug, Parser)]
#[command(name = "psystem", version, about = "Damped p-system experiments: simulate, verify decay rates, solve profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write snapshots, the diagnostics series and fits.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to output.directory of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit decay slopes of a stored series against expectations.
    Verify {
        #[arg(long)]
        series: PathBuf,
        /// `column=slope:tol`, repeatable; defaults to the case expectations.
        #[arg(long = "expect")]
        expect: Vec<Expectation>,
    },
    /// Solve the similarity profile and check its Gaussian bounds.
    Profile {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the decay of the closed-form forcing norms.
    CheckForcing {
        #[arg(long)]
        config: PathBuf,
        /// `lo:hi:count`, log-spaced.
        #[arg(long = "t-samples", default_value = "1:400:24")]
        t_samples: String,
    },
}

/// Run the command line `args` (program name first); returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (code, text) = match cli.command {
        Command::Simulate { config, out } => match load_config(&config) {
            Ok(cfg) => {
                let out = out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
                let r = cmd_simulate(&cfg, &out);
                (r.exit, r.text)
            }
            Err(e) => (exit_code(&e), format!("error: {e}\n")),
        },
        Command::Verify { series, expect } => cmd_verify(&series, &expect),
        Command::Profile { config, out } => match load_config(&config) {
            Ok(cfg) => cmd_profile(&cfg, &out),
            Err(e) => (exit_code(&e), format!("error: {e}\n")),
        },
        Command::CheckForcing { config, t_samples } => {
            match load_config(&config).and_then(|cfg| Ok((cfg, parse_t_samples(&t_samples)?))) {
                Ok((cfg, times)) => cmd_check_forcing(&cfg, &times),
                Err(e) => (exit_code(&e), format!("error: {e}\n")),
            }
        }
    };
    if code == 0 {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    code
}
