use super::config::ExperimentConfig;
use crate::diagnostics::{
    decay_fit, Case, DiagnosticsSeries, EnergySeries, Expectation, FitVerdict, SeriesBuilder,
};
use crate::error::{Error, Result};
use crate::math::quad::trapezoid;
use crate::models::{DampingField, EndStates, FlowState, Grid1D, PressureLaw};
use crate::profiles::{
    mu_const, select_delta0, shift_select, CorrectionFunction, DiffusionWave, Diffusivity, Mollifier, Profile,
    ReferenceSolution, SimilarityOptions, SimilarityProfile,
};
use crate::solver::{InitialData, RunSummary, Solver};

/// Everything built from a configuration before time stepping.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub law: PressureLaw,
    pub field: DampingField,
    pub grid: Grid1D,
    pub ends: EndStates,
    pub reference: ReferenceSolution,
    pub initial: FlowState,
    /// `|v0 - v_bar|_1 + |u+ - u-|` or `|v+ - v-| + |u+ - u-|`.
    pub delta_1: f64,
    pub mass_defect_0: f64,
    pub warnings: Vec<String>,
}

pub fn similarity_options(config: &ExperimentConfig) -> SimilarityOptions {
    SimilarityOptions {
        xi_max: config.profile.xi_max,
        n_nodes: config.profile.n_nodes,
        tol: config.profile.tol,
    }
}

pub fn solve_profile(config: &ExperimentConfig, law: PressureLaw) -> Result<SimilarityProfile> {
    let e = &config.end_states;
    SimilarityProfile::solve(
        Diffusivity::Pressure { law, alpha_bar: config.damping.alpha_bar },
        e.v_minus,
        e.v_plus,
        similarity_options(config),
    )
}

/// Build models, the reference solution and mass-selected initial data.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let v = config.violations();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let law = config.law()?;
    let field = config.field()?;
    let grid = config.grid()?;
    let c = config.end_states;
    let ends = EndStates::new(c.v_minus, c.v_plus, c.u_minus, c.u_plus)?;
    let mollifier = Mollifier::new(config.profile.mollifier_width, config.profile.mollifier_center)?;
    let correction = CorrectionFunction::new(mollifier, ends.u_minus, ends.u_plus, field);
    let mut warnings = Vec::new();
    if let Err(e) = correction.check_support(&grid) {
        warnings.push(e.to_string());
    }
    let i = &config.init;
    let data = InitialData {
        velocity_amplitude: i.velocity_amplitude,
        ..InitialData::perturbation(i.kind, i.amplitude, i.width, i.center)
    };
    let alpha_bar = field.alpha_bar();

    let (reference, initial, delta_1) = match config.case {
        Case::ConstState => {
            let v_bar = ends.v_minus;
            let mu = mu_const(&law, v_bar, alpha_bar)?;
            let base = ReferenceSolution::new(
                Profile::Diffusion(DiffusionWave::new(v_bar, mu, i.profile_mass)?),
                correction,
            );
            let initial = data.generate(&grid, &ends, &base)?;
            let delta_0 = select_delta0(&initial.v, v_bar, ends.u_minus, ends.u_plus, alpha_bar, &grid)?;
            let excess: Vec<f64> = initial.v.iter().map(|v| (v - v_bar).abs()).collect();
            let delta_1 = trapezoid(&excess, grid.dx()) + ends.velocity_jump();
            let reference =
                ReferenceSolution::new(Profile::Diffusion(DiffusionWave::new(v_bar, mu, delta_0)?), correction);
            (reference, initial, delta_1)
        }
        Case::Similarity => {
            let profile = solve_profile(config, law)?;
            let base = ReferenceSolution::new(Profile::Similarity(profile.clone()), correction);
            let initial = data.generate(&grid, &ends, &base)?;
            let x0 = shift_select(&initial.v, &profile, &ends, alpha_bar, &grid)?;
            let reference = ReferenceSolution::new(Profile::Similarity(profile.with_shift(x0)), correction);
            (reference, initial, ends.volume_jump() + ends.velocity_jump())
        }
    };
    let mass_defect_0 = crate::diagnostics::mass_defect(&initial, &reference, &grid);
    Ok(Prepared {
        config: config.clone(),
        law,
        field,
        grid,
        ends,
        reference,
        initial,
        delta_1,
        mass_defect_0,
        warnings,
    })
}

/// Result of a completed or blown-up run.
#[derive(Debug)]
pub struct RunOutcome {
    pub series: DiagnosticsSeries,
    pub energy: EnergySeries,
    pub summary: RunSummary,
    /// Set when positivity was lost; the series then stops at the last snapshot.
    pub blow_up: Option<Error>,
    pub final_state: Option<FlowState>,
}

/// Time-step `prep`, building the diagnostics series and handing every snapshot to `sink`.
pub fn run_prepared(
    prep: &Prepared,
    mut sink: impl FnMut(usize, &FlowState) -> Result<()>,
) -> Result<RunOutcome> {
    let config = &prep.config;
    let mut solver = Solver::new(prep.law, prep.field, prep.grid, prep.ends, config.solver_config())?;
    let support = config.profile.mollifier_width + config.profile.mollifier_center.abs();
    let mut warnings = prep.warnings.clone();
    if let Some(w) = solver.domain_check(&prep.initial, support) {
        warnings.push(w);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut builder =
        SeriesBuilder::new(prep.reference.clone(), prep.law, prep.grid, config.verify.gamma_w, prep.delta_1);
    let mut last_summary = RunSummary::default();
    let mut k = 0usize;
    let result = solver.run(prep.initial.clone(), |state, summary| {
        builder.push(state, summary.boundary_mass_flux)?;
        last_summary = *summary;
        sink(k, state)?;
        k += 1;
        Ok(())
    });
    let (blow_up, final_state, summary) = match result {
        Ok((state, summary)) => (None, Some(state), summary),
        Err(e @ Error::BlowUp { .. }) => (Some(e), None, last_summary),
        Err(e) => return Err(e),
    };
    let (mut series, energy) = builder.finish()?;
    series.set_meta("config_hash", config.hash());
    series.set_meta("mass_defect_0", format!("{:e}", prep.mass_defect_0));
    let (lo, hi) = config.fit_window();
    series.set_meta("fit_window_lo", format!("{lo:?}"));
    series.set_meta("fit_window_hi", format!("{hi:?}"));
    match &prep.reference.profile {
        Profile::Diffusion(w) => series.set_meta("delta_0", format!("{:?}", w.delta_0)),
        Profile::Similarity(p) => series.set_meta("x0", format!("{:?}", p.x0())),
    }
    if let Some(e) = &blow_up {
        series.set_meta("blow_up", e.to_string().replace('\n', " "));
    }
    if !warnings.is_empty() {
        series.set_meta("warnings", warnings.join("; ").replace('\n', " "));
    }
    Ok(RunOutcome {
        series,
        energy,
        summary,
        blow_up,
        final_state,
    })
}

/// Default slope expectations for the error columns of `case`.
pub fn default_expectations(case: Case, gamma_w: f64) -> Vec<Expectation> {
    match case {
        Case::ConstState => vec![
            Expectation::new("L2_v_err", -0.5, 0.15),
            Expectation::new("L2_u_err", -1.0, 0.25),
            Expectation::new("Linf_v_err", -0.75, 0.15),
        ],
        Case::Similarity => vec![
            Expectation::new("L2_v_err", -(1.0 - gamma_w) / 2.0, 0.15),
            Expectation::new("L2_u_err", -0.5, 0.15),
            Expectation::new("Linf_v_err", -(2.0 - gamma_w) / 2.0, 0.2),
        ],
    }
}

/// Fit every expectation on `series` over `window`.
pub fn verify_series(series: &DiagnosticsSeries, expectations: &[Expectation], window: (f64, f64)) -> Result<Vec<FitVerdict>> {
    let ts = series.times();
    expectations
        .iter()
        .map(|e| {
            let fit = decay_fit(&e.column, &ts, &series.column(&e.column)?, window)?;
            Ok(FitVerdict {
                pass: e.passes(&fit),
                fit,
                expected: e.clone(),
            })
        })
        .collect()
}

/// Expectations of a configuration: the case defaults with configured tolerances.
pub fn config_expectations(config: &ExperimentConfig) -> Vec<Expectation> {
    let mut out = default_expectations(config.case, config.verify.gamma_w);
    for e in &mut out {
        if let Some(tol) = config.verify.tolerances.get(&e.column) {
            e.tol = *tol;
        }
    }
    out
}
