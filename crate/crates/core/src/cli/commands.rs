use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::{parse_config, ExperimentConfig};
use super::experiment::{config_expectations, default_expectations, prepare, run_prepared, solve_profile, verify_series};
use crate::diagnostics::{
    format_report, forcing_decay_check, forcing_f, forcing_g, log_spaced, write_report_csv, Case, DiagnosticsSeries,
    Expectation, ForcingCheck,
};
use crate::error::{Error, Result};
use crate::models::FlowState;
use crate::profiles::Profile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Exit status of an error outcome.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::Io { .. } | Error::Csv(_) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `x,v,u` snapshot with a `.meta` sidecar holding `t` and the config hash.
pub fn write_snapshot(dir: &Path, index: usize, state: &FlowState, xs: &[f64], hash: &str) -> Result<PathBuf> {
    let path = dir.join(format!("snap_{index:05}.csv"));
    let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = std::io::BufWriter::new(f);
    let io = |e| Error::io(&path, e);
    writeln!(w, "x,v,u").map_err(io)?;
    for ((x, v), u) in xs.iter().zip(&state.v).zip(&state.u) {
        writeln!(w, "{x:?},{v:?},{u:?}").map_err(io)?;
    }
    w.flush().map_err(io)?;
    write(&path.with_extension("meta"), &format!("t={:?}\nconfig_hash={hash}\n", state.t))?;
    Ok(path)
}

pub fn read_snapshot(path: &Path) -> Result<(Vec<f64>, FlowState)> {
    let meta_path = path.with_extension("meta");
    let meta = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let t = meta
        .lines()
        .find_map(|l| l.strip_prefix("t="))
        .and_then(|s| s.parse::<f64>().ok())
        .ok_or_else(|| Error::Schema(format!("{} has no t= record", meta_path.display())))?;
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().collect::<Vec<_>>() != ["x", "v", "u"] {
        return Err(Error::Schema(format!("{} must have header x,v,u", path.display())));
    }
    let (mut xs, mut v, mut u) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.deserialize::<(f64, f64, f64)>() {
        let (x, a, b) = rec?;
        xs.push(x);
        v.push(a);
        u.push(b);
    }
    Ok((xs, FlowState::new(t, v, u)?))
}

/// One-line gnuplot script plotting the error columns on log-log axes.
pub fn gnuplot_script(series_file: &str) -> String {
    format!(
        "set datafile separator ','; set logscale xy; set key autotitle columnhead; plot for [c in 'L2_v_err L2_u_err Linf_v_err L2_phix'] '{series_file}' using 1:(column(c)) with lines title c\n"
    )
}

/// Summary of a `simulate` invocation.
#[derive(Debug)]
pub struct SimulateReport {
    pub exit: i32,
    pub text: String,
    pub series: Option<DiagnosticsSeries>,
}

/// Run an experiment and write snapshots, the series, fits, the config echo and a plot script to `out`.
pub fn cmd_simulate(config: &ExperimentConfig, out: &Path) -> SimulateReport {
    let mut text = String::new();
    match simulate_inner(config, out, &mut text) {
        Ok((exit, series)) => SimulateReport { exit, text, series: Some(series) },
        Err(e) => {
            text += &format!("error: {e}\n");
            if matches!(e, Error::Io { .. }) {
                text += &format!("partial results may remain in {}\n", out.display());
            }
            SimulateReport { exit: exit_code(&e), text, series: None }
        }
    }
}

fn simulate_inner(config: &ExperimentConfig, out: &Path, text: &mut String) -> Result<(i32, DiagnosticsSeries)> {
    let snap_dir = out.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;
    let hash = config.hash();
    write(&out.join("config.toml"), &format!("# config_hash={hash}\n{}", config.emit()))?;

    let prep = prepare(config)?;
    *text += &format!("case {} with {} cells, config hash {hash}\n", config.case.name(), prep.grid.n_cells());
    *text += &format!("initial mass defect {:.3e}\n", prep.mass_defect_0);
    for w in &prep.warnings {
        *text += &format!("warning: {w}\n");
    }
    let xs = prep.grid.centers();
    let stride = config.output.stride;
    let mut written = 0usize;
    let outcome = run_prepared(&prep, |k, state| {
        if k % stride == 0 {
            write_snapshot(&snap_dir, k, state, &xs, &hash)?;
            written += 1;
        }
        Ok(())
    })?;
    let series_path = out.join("series.csv");
    outcome.series.write_csv(&series_path)?;
    write(&out.join("plot.gp"), &gnuplot_script("series.csv"))?;
    *text += &format!(
        "{} steps, {} snapshots ({} written), max conservation error {:.2e}, energy family {}\n",
        outcome.summary.steps,
        outcome.summary.snapshots,
        written,
        outcome.summary.max_conservation_error,
        outcome.energy.family.name()
    );

    if let Some(e) = &outcome.blow_up {
        *text += &format!("BLOW-UP: {e}\n");
        return Ok((EXIT_BLOW_UP, outcome.series));
    }

    let window = config.fit_window();
    let verdicts = match verify_series(&outcome.series, &config_expectations(config), window) {
        Ok(v) => v,
        Err(Error::InsufficientData(m) | Error::Argument(m)) => {
            *text += &format!("fit section empty: {m}\n");
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    let report = format_report(&verdicts);
    write(&out.join("fits.txt"), &report)?;
    let csv_path = out.join("fits.csv");
    let f = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_report_csv(&verdicts, f)?;
    if !verdicts.is_empty() {
        *text += &report;
    }
    Ok((EXIT_OK, outcome.series))
}

/// Fit the columns of a stored series; exit 0 iff every expectation passes.
pub fn cmd_verify(series_path: &Path, expectations: &[Expectation]) -> (i32, String) {
    let run = || -> Result<(bool, String)> {
        let series = DiagnosticsSeries::read_csv(series_path)?;
        let expect = if expectations.is_empty() {
            let gamma_w = series.meta("gamma_w").and_then(|g| g.parse().ok()).unwrap_or(0.75);
            default_expectations(series.case, gamma_w)
        } else {
            expectations.to_vec()
        };
        let t_final = series.times().last().copied().unwrap_or(0.0);
        let meta_f = |k: &str| series.meta(k).and_then(|v| v.parse::<f64>().ok());
        let window = (
            meta_f("fit_window_lo").unwrap_or((t_final / 10.0).max(1.0)),
            meta_f("fit_window_hi").unwrap_or(t_final),
        );
        let verdicts = verify_series(&series, &expect, window)?;
        let all = verdicts.iter().all(|v| v.pass);
        Ok((all, format_report(&verdicts)))
    };
    match run() {
        Ok((true, report)) => (EXIT_OK, report + "overall: PASS\n"),
        Ok((false, report)) => (EXIT_VALIDATION, report + "overall: FAIL\n"),
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    }
}

/// Solve the similarity profile of a configuration, export its table and check the Gaussian bounds.
pub fn cmd_profile(config: &ExperimentConfig, out: &Path) -> (i32, String) {
    let run = || -> Result<(bool, String)> {
        let profile = solve_profile(config, config.law()?)?;
        profile.export(out)?;
        let fit = profile.gaussian_bound_check()?;
        let text = format!(
            "nodes {} on [-{}, {}], max residual {:.3e}, boundary mismatch {:.3e}\nC_fit {:.4} c_fit {:.4} c_floor {:.4} pass {}\n",
            profile.n_nodes(),
            profile.xi_max(),
            profile.xi_max(),
            profile.max_residual(),
            profile.boundary_mismatch(),
            fit.c_big,
            fit.c_fit,
            fit.c_floor,
            fit.pass
        );
        Ok((fit.pass, text))
    };
    match run() {
        Ok((pass, text)) => (if pass { EXIT_OK } else { EXIT_VALIDATION }, text),
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    }
}

/// `lo:hi:count` log-spaced sample times.
pub fn parse_t_samples(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Argument(format!("t-samples {spec:?} is not of the form lo:hi:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(bad());
    }
    Ok(log_spaced(lo, hi, n))
}

/// Closed-form forcing norms at `times` and their fitted decay slopes.
pub fn forcing_checks(config: &ExperimentConfig, times: &[f64]) -> Result<Vec<ForcingCheck>> {
    let prep = prepare(config)?;
    let corr = &prep.reference.correction;
    let dx = prep.grid.dx();
    let samples = times
        .iter()
        .map(|&t| {
            let fields = match &prep.reference.profile {
                Profile::Diffusion(w) => forcing_f(t, &prep.grid, w, corr, &prep.law)?,
                Profile::Similarity(p) => forcing_g(t, &prep.grid, p, corr, &prep.law)?,
            };
            Ok((t, fields.norms(dx)))
        })
        .collect::<Result<Vec<_>>>()?;
    forcing_decay_check(&samples, config.case == Case::Similarity)
}

pub fn cmd_check_forcing(config: &ExperimentConfig, times: &[f64]) -> (i32, String) {
    match forcing_checks(config, times) {
        Ok(checks) => {
            let mut text = format!("{:<12} {:>10} {:>10} {:>8}  verdict\n", "norm", "slope", "bound", "r2");
            for c in &checks {
                text += &format!(
                    "{:<12} {:>10.4} {:>10.4} {:>8.4}  {}\n",
                    c.name,
                    c.slope,
                    c.bound + crate::diagnostics::FORCING_SLOPE_TOLERANCE,
                    c.r2,
                    if c.pass { "PASS" } else { "FAIL" }
                );
            }
            let all = checks.iter().all(|c| c.pass);
            (if all { EXIT_OK } else { EXIT_VALIDATION }, text)
        }
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    }
}
