use crate::error::{Error, Result};
use crate::models::{EndStates, FlowState, Grid1D};
use crate::profiles::ReferenceSolution;

/// Largest mismatch between the initial data and the end states at the grid edge.
pub const EDGE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    /// Reference `(V + v_hat, U + u_hat)(0)` plus a Gaussian perturbation.
    ProfilePlusPerturbation,
    /// `v- + A exp(-((x - c)/w)^2)` with `u = u_hat(0)`; equal end states only.
    GaussianHump,
    /// Piecewise-linear data from `(x, v, u)` rows.
    CustomTable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    /// Gaussian added to `u`; positive values compress the right flank.
    pub velocity_amplitude: f64,
    /// Rows `(x, v, u)` sorted by `x`, for [`InitialKind::CustomTable`].
    pub table: Vec<(f64, f64, f64)>,
}

impl InitialData {
    pub fn perturbation(kind: InitialKind, amplitude: f64, width: f64, center: f64) -> Self {
        Self {
            kind,
            amplitude,
            width,
            center,
            velocity_amplitude: 0.0,
            table: Vec::new(),
        }
    }

    fn bump(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        (-z * z).exp()
    }

    /// Sample `(v0, u0)` on the grid; `base` supplies the reference fields at `t = 0`.
    pub fn generate(&self, grid: &Grid1D, ends: &EndStates, base: &ReferenceSolution) -> Result<FlowState> {
        if self.kind != InitialKind::CustomTable && !(self.width > 0.0) {
            return Err(Error::Argument(format!("perturbation width must be positive, got {}", self.width)));
        }
        let (v, u): (Vec<f64>, Vec<f64>) = match self.kind {
            InitialKind::GaussianHump => {
                if !ends.equal_volumes() {
                    return Err(Error::Argument("gaussian_hump needs v- = v+".into()));
                }
                (0..grid.n_cells())
                    .map(|i| {
                        let x = grid.x(i);
                        let (_, u_hat) = base.correction.eval(0.0, x)?;
                        let g = self.bump(x);
                        Ok((ends.v_minus + self.amplitude * g, u_hat + self.velocity_amplitude * g))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .unzip()
            }
            InitialKind::ProfilePlusPerturbation => {
                let r = base.sample(0.0, grid);
                (0..grid.n_cells())
                    .map(|i| {
                        let g = self.bump(grid.x(i));
                        (
                            r.v_profile[i] + r.v_hat[i] + self.amplitude * g,
                            r.u_profile[i] + r.u_hat[i] + self.velocity_amplitude * g,
                        )
                    })
                    .unzip()
            }
            InitialKind::CustomTable => {
                if self.table.len() < 2 {
                    return Err(Error::Argument("custom initial table needs at least two rows".into()));
                }
                if self.table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::Argument("custom initial table must be sorted by strictly increasing x".into()));
                }
                grid.centers().into_iter().map(|x| self.interpolate(x, ends)).unzip()
            }
        };

        if let Some((i, &vi)) = v.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::Domain(format!(
                "initial volume {vi} at x = {} is not positive",
                grid.x(i)
            )));
        }
        let n = v.len();
        let edge = [
            (v[0] - ends.v_minus).abs(),
            (v[n - 1] - ends.v_plus).abs(),
            (u[0] - ends.u_minus).abs(),
            (u[n - 1] - ends.u_plus).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if edge > EDGE_TOLERANCE {
            return Err(Error::Truncation {
                what: "initial data minus end states".into(),
                magnitude: edge,
            });
        }
        FlowState::new(0.0, v, u)
    }

    fn interpolate(&self, x: f64, ends: &EndStates) -> (f64, f64) {
        let first = self.table[0];
        let last = self.table[self.table.len() - 1];
        if x <= first.0 {
            return (ends.v_minus, ends.u_minus);
        }
        if x >= last.0 {
            return (ends.v_plus, ends.u_plus);
        }
        let k = self.table.partition_point(|r| r.0 <= x) - 1;
        let (a, b) = (self.table[k], self.table[k + 1]);
        let s = (x - a.0) / (b.0 - a.0);
        (a.1 + s * (b.1 - a.1), a.2 + s * (b.2 - a.2))
    }
}
