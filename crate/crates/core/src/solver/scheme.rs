use crate::error::{Error, Result};
use crate::models::{DampingField, EndStates, FlowState, Grid1D, PressureLaw};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Ghost cells hold `(v-, u- e^(-alpha_bar t))` and `(v+, u+ e^(-alpha_bar t))`.
    FarfieldDecay,
    /// Zero-gradient ghost cells.
    Extrapolation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_final: f64,
    pub snapshot_stride: f64,
    pub boundary: Boundary,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            t_final: 1.0,
            snapshot_stride: 1.0,
            boundary: Boundary::FarfieldDecay,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            errs.push(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            errs.push(format!("t_final must be non-negative, got {}", self.t_final));
        }
        if !(self.snapshot_stride > 0.0) {
            errs.push(format!("snapshot_stride must be positive, got {}", self.snapshot_stride));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// `max_i sqrt(-p'(v_i))`
pub fn max_wave_speed(state: &FlowState, law: &PressureLaw) -> Result<f64> {
    if let Some((i, v)) = state.first_nonpositive() {
        return Err(Error::State(format!("non-positive volume {v} in cell {i}")));
    }
    Ok(state.v.iter().map(|&v| law.sound_speed(v)).fold(0.0, f64::max))
}

/// Rusanov flux for `(v, u)_t + (-u, p(v))_x = 0`.
pub fn hyperbolic_flux(left: (f64, f64), right: (f64, f64), law: &PressureLaw) -> (f64, f64) {
    let s = law.sound_speed(left.0).max(law.sound_speed(right.0));
    rusanov(left, right, law.pressure(left.0), law.pressure(right.0), s)
}

#[inline(always)]
fn rusanov(left: (f64, f64), right: (f64, f64), p_left: f64, p_right: f64, s: f64) -> (f64, f64) {
    (
        -0.5 * (left.1 + right.1) - 0.5 * s * (right.0 - left.0),
        0.5 * (p_left + p_right) - 0.5 * s * (right.1 - left.1),
    )
}

/// `u_i <- u_i exp(-alpha(x_i) dt)`
pub fn damping_substep(state: &FlowState, dt: f64, field: &DampingField, grid: &Grid1D) -> FlowState {
    let u = state
        .u
        .iter()
        .enumerate()
        .map(|(i, &u)| u * (-field.alpha(grid.x(i)) * dt).exp())
        .collect();
    FlowState {
        t: state.t,
        v: state.v.clone(),
        u,
    }
}

/// What one step did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    /// `dt (F_v(left face) - F_v(right face))`: the change of `sum v dx` the step must produce.
    pub boundary_mass_flux: f64,
    /// `sum (v_new - v_old) dx` over the interior.
    pub mass_change: f64,
    pub max_speed: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub snapshots: usize,
    pub t_final: f64,
    /// Accumulated boundary flux of `v`.
    pub boundary_mass_flux: f64,
    /// Largest per-step `|Delta sum v dx - boundary flux|`.
    pub max_conservation_error: f64,
    pub max_cfl_ratio: f64,
}

/// Time stepper bound to one model and grid.
#[derive(Clone, Debug)]
pub struct Solver {
    law: PressureLaw,
    field: DampingField,
    grid: Grid1D,
    ends: EndStates,
    config: SolverConfig,
    // cells where alpha differs from alpha_bar, with their alpha
    bump_cells: Vec<(usize, f64)>,
    // scratch: volume, velocity, pressure, sound speed including one ghost per side
    v: Vec<f64>,
    u: Vec<f64>,
    p: Vec<f64>,
    c: Vec<f64>,
    fv: Vec<f64>,
    fu: Vec<f64>,
}

impl Solver {
    pub fn new(
        law: PressureLaw,
        field: DampingField,
        grid: Grid1D,
        ends: EndStates,
        config: SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        let bump_cells = (0..grid.n_cells())
            .filter_map(|i| {
                let a = field.alpha(grid.x(i));
                (a != field.alpha_bar()).then_some((i, a))
            })
            .collect();
        let n = grid.n_cells() + 2;
        Ok(Self {
            law,
            field,
            grid,
            ends,
            config,
            bump_cells,
            v: vec![0.0; n],
            u: vec![0.0; n],
            p: vec![0.0; n],
            c: vec![0.0; n],
            fv: vec![0.0; n - 1],
            fu: vec![0.0; n - 1],
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Warning text when waves at the largest sound speed can reach the boundary.
    pub fn domain_check(&self, state: &FlowState, support_radius: f64) -> Option<String> {
        let v_min = state.v.iter().copied().fold(f64::INFINITY, f64::min);
        if !(v_min > 0.0) {
            return None;
        }
        let reach = self.law.sound_speed(v_min) * self.config.t_final + support_radius;
        (self.grid.half_length() <= reach).then(|| {
            format!(
                "half_length {} does not exceed sound speed * t_final + support = {reach:.1}; boundary data may influence the run",
                self.grid.half_length()
            )
        })
    }

    fn damp(&self, u: &mut [f64], h: f64) {
        let base = (-self.field.alpha_bar() * h).exp();
        let mut bumps = self.bump_cells.iter().peekable();
        for (i, ui) in u.iter_mut().enumerate() {
            match bumps.peek() {
                Some(&&(j, a)) if j == i => {
                    *ui *= (-a * h).exp();
                    bumps.next();
                }
                _ => *ui *= base,
            }
        }
    }

    fn fill_ghosts(&mut self, t: f64) {
        let n = self.grid.n_cells();
        match self.config.boundary {
            Boundary::FarfieldDecay => {
                let decay = (-self.field.alpha_bar() * t).exp();
                self.v[0] = self.ends.v_minus;
                self.u[0] = self.ends.u_minus * decay;
                self.v[n + 1] = self.ends.v_plus;
                self.u[n + 1] = self.ends.u_plus * decay;
            }
            Boundary::Extrapolation => {
                self.v[0] = self.v[1];
                self.u[0] = self.u[1];
                self.v[n + 1] = self.v[n];
                self.u[n + 1] = self.u[n];
            }
        }
    }

    fn update_pressure(&mut self) {
        for ((p, c), &v) in self.p.iter_mut().zip(self.c.iter_mut()).zip(&self.v) {
            *p = self.law.pressure(v);
            *c = (self.law.gamma_p() * *p / v).sqrt();
        }
    }

    /// Stable step size for `state`.
    pub fn stable_dt(&mut self, state: &FlowState) -> Result<f64> {
        let n = self.grid.n_cells();
        self.v[1..=n].copy_from_slice(&state.v);
        self.fill_ghosts(state.t);
        let s = self.v.iter().map(|&v| self.law.sound_speed(v)).fold(0.0, f64::max);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::State(format!("invalid wave speed {s}")));
        }
        Ok(self.config.cfl * self.grid.dx() / s)
    }

    /// One Strang step of at most `dt_max`.
    pub fn step(&mut self, state: &mut FlowState, dt_max: f64) -> Result<StepInfo> {
        let n = self.grid.n_cells();
        let dx = self.grid.dx();
        let t = state.t;
        self.v[1..=n].copy_from_slice(&state.v);
        self.u[1..=n].copy_from_slice(&state.u);

        // sound speeds are unaffected by the damping half step, so dt is fixed here
        self.fill_ghosts(t);
        self.update_pressure();
        let s_max = self.c.iter().copied().fold(0.0, f64::max);
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(self.blow_up(t, &self.v[1..=n]));
        }
        let dt_cfl = self.config.cfl * dx / s_max;
        let dt = dt_cfl.min(dt_max);

        let half = 0.5 * dt;
        self.damp_interior(half);
        self.fill_ghosts(t + half);

        for j in 0..=n {
            let s = self.c[j].max(self.c[j + 1]);
            let (fv, fu) = rusanov(
                (self.v[j], self.u[j]),
                (self.v[j + 1], self.u[j + 1]),
                self.p[j],
                self.p[j + 1],
                s,
            );
            self.fv[j] = fv;
            self.fu[j] = fu;
        }
        let r = dt / dx;
        let mut mass_change = 0.0;
        for i in 1..=n {
            let old = self.v[i];
            self.v[i] = old - r * (self.fv[i] - self.fv[i - 1]);
            mass_change += self.v[i] - old;
            self.u[i] -= r * (self.fu[i] - self.fu[i - 1]);
        }
        self.damp_interior(half);

        let interior = &self.v[1..=n];
        if interior.iter().any(|&v| !(v > 0.0 && v.is_finite()))
            || self.u[1..=n].iter().any(|u| !u.is_finite())
        {
            return Err(self.blow_up(t + dt, interior));
        }
        state.v.copy_from_slice(interior);
        state.u.copy_from_slice(&self.u[1..=n]);
        state.t = t + dt;
        Ok(StepInfo {
            dt,
            boundary_mass_flux: dt * (self.fv[0] - self.fv[n]),
            mass_change: mass_change * dx,
            max_speed: s_max,
        })
    }

    fn damp_interior(&mut self, h: f64) {
        let n = self.grid.n_cells();
        let mut u = std::mem::take(&mut self.u);
        self.damp(&mut u[1..=n], h);
        self.u = u;
    }

    fn blow_up(&self, t: f64, v: &[f64]) -> Error {
        let (i, &vi) = v
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0 && v.is_finite()))
            .unwrap_or((0, &v[0]));
        Error::BlowUp {
            t,
            x: self.grid.x(i),
            v: vi,
        }
    }

    /// Advance `state` to `t_final`, calling `observer` at `t = 0`, at every
    /// multiple of `snapshot_stride`, and at `t_final`, with the summary so far.
    pub fn run(
        &mut self,
        mut state: FlowState,
        mut observer: impl FnMut(&FlowState, &RunSummary) -> Result<()>,
    ) -> Result<(FlowState, RunSummary)> {
        if state.len() != self.grid.n_cells() {
            return Err(Error::State(format!(
                "state has {} cells, grid has {}",
                state.len(),
                self.grid.n_cells()
            )));
        }
        state.check_positive()?;
        let t_final = self.config.t_final;
        let stride = self.config.snapshot_stride;
        let dx = self.grid.dx();
        let mut summary = RunSummary::default();
        summary.snapshots = 1;
        observer(&state, &summary)?;

        let mut k = 1usize;
        while state.t < t_final {
            let next = (k as f64 * stride).min(t_final);
            let remaining = next - state.t;
            let info = self.step(&mut state, remaining)?;
            summary.max_conservation_error = summary
                .max_conservation_error
                .max((info.mass_change - info.boundary_mass_flux).abs());
            summary.boundary_mass_flux += info.boundary_mass_flux;
            summary.max_cfl_ratio = summary.max_cfl_ratio.max(info.dt * info.max_speed / dx);
            summary.steps += 1;
            if next - state.t <= 1e-12 * next.max(1.0) {
                state.t = next;
                summary.snapshots += 1;
                summary.t_final = state.t;
                observer(&state, &summary)?;
                k += 1;
            }
        }
        summary.t_final = state.t;
        Ok((state, summary))
    }
}
