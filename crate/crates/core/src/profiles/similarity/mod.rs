//! Self-similar profile `V(t, x) = W((x - x0) / sqrt(1 + t))` of the nonlinear
//! Darcy equation `V_t = (mu(V) V_x)_x`, tabulated on a uniform `xi` grid.

mod bounds;
mod io;
mod shift;
mod solve;

pub use bounds::GaussianBoundFit;
pub use shift::shift_select;
pub use solve::{similarity_solve, SimilarityOptions};

use crate::error::{Error, Result};
use crate::models::PressureLaw;

use super::reference::FieldDerivs;

/// Diffusion coefficient `mu(v)` of the Darcy equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Diffusivity {
    /// `mu(v) = -p'(v) / alpha_bar`
    Pressure { law: PressureLaw, alpha_bar: f64 },
    /// Frozen coefficient; the profile is an error function.
    Constant(f64),
}

impl Diffusivity {
    /// `[mu, mu', mu'']` at `v`.
    #[inline]
    pub fn jet(&self, v: f64) -> [f64; 3] {
        match *self {
            Diffusivity::Pressure { law, alpha_bar } => {
                let p = law.derivatives(v);
                [-p[1] / alpha_bar, -p[2] / alpha_bar, -p[3] / alpha_bar]
            }
            Diffusivity::Constant(mu) => [mu, 0.0, 0.0],
        }
    }

    #[inline]
    pub fn mu(&self, v: f64) -> f64 {
        match *self {
            Diffusivity::Pressure { law, alpha_bar } => -law.derivative(v, 1) / alpha_bar,
            Diffusivity::Constant(mu) => mu,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimilarityQuantity {
    V,
    Vx,
    Vxx,
    Vxxx,
    Vt,
    U,
    Ut,
}

/// Tabulated similarity profile with its shift `x0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityProfile {
    diffusivity: Diffusivity,
    v_minus: f64,
    v_plus: f64,
    xi_max: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    residual: Vec<f64>,
    x0: f64,
    boundary_mismatch: f64,
}

impl SimilarityProfile {
    /// Profile from a table of `(W, W')` on the uniform grid over `[-xi_max, xi_max]`.
    pub fn from_table(
        diffusivity: Diffusivity,
        v_minus: f64,
        v_plus: f64,
        xi_max: f64,
        values: Vec<f64>,
        slopes: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != slopes.len() {
            return Err(Error::Argument(format!(
                "profile table has {} values but {} slopes",
                values.len(),
                slopes.len()
            )));
        }
        if values.len() < 2 {
            return Err(Error::State("profile table needs at least two nodes".into()));
        }
        if !(xi_max > 0.0) {
            return Err(Error::Domain(format!("xi_max must be positive, got {xi_max}")));
        }
        let mut profile = Self {
            diffusivity,
            v_minus,
            v_plus,
            xi_max,
            values,
            slopes,
            residual: Vec::new(),
            x0: 0.0,
            boundary_mismatch: 0.0,
        };
        profile.residual = profile.ode_residual();
        profile.boundary_mismatch = (profile.values[0] - v_minus)
            .abs()
            .max((profile.values[profile.values.len() - 1] - v_plus).abs());
        Ok(profile)
    }

    pub fn diffusivity(&self) -> &Diffusivity {
        &self.diffusivity
    }

    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    /// `delta_0 = |v+ - v-|`
    pub fn delta0(&self) -> f64 {
        (self.v_plus - self.v_minus).abs()
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn n_nodes(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.xi_max / (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.xi_max + i as f64 * self.spacing()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Centred-difference residual of `(mu W')' + (xi/2) W'` at each node (zero at the ends).
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn max_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Largest deviation from `v-` or `v+` at the ends of the table, or the
    /// estimated tail error of the truncation if that is larger.
    pub fn boundary_mismatch(&self) -> f64 {
        self.boundary_mismatch
    }

    pub(crate) fn set_boundary_mismatch(&mut self, m: f64) {
        self.boundary_mismatch = m;
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn with_shift(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.v_minus == self.v_plus
    }

    fn ode_residual(&self) -> Vec<f64> {
        let n = self.values.len();
        let h = self.spacing();
        let q: Vec<f64> = self
            .values
            .iter()
            .zip(&self.slopes)
            .map(|(&v, &d)| self.diffusivity.mu(v) * d)
            .collect();
        let mut r = vec![0.0; n];
        for i in 1..n.saturating_sub(1) {
            r[i] = (q[i + 1] - q[i - 1]) / (2.0 * h) + 0.5 * self.node(i) * self.slopes[i];
        }
        r
    }

    /// `[W, W', W'', W''']` at `xi`: cubic Hermite for the first two, the ODE
    /// for the rest. Constant `v-`/`v+` with zero slopes outside the table.
    pub fn jet(&self, xi: f64) -> [f64; 4] {
        if xi <= -self.xi_max {
            return [self.v_minus, 0.0, 0.0, 0.0];
        }
        if xi >= self.xi_max {
            return [self.v_plus, 0.0, 0.0, 0.0];
        }
        let h = self.spacing();
        let pos = (xi + self.xi_max) / h;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let s = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let w = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1;
        let dw = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * h * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * h * d1)
            / h;
        self.ode_jet(xi, w, dw)
    }

    /// Second and third derivatives implied by `(mu(W) W')' + (xi/2) W' = 0`.
    fn ode_jet(&self, xi: f64, w: f64, dw: f64) -> [f64; 4] {
        let [mu, mu1, mu2] = self.diffusivity.jet(w);
        let d2 = -(0.5 * xi * dw + mu1 * dw * dw) / mu;
        let d3 = -(3.0 * mu1 * dw * d2 + mu2 * dw * dw * dw + 0.5 * dw + 0.5 * xi * d2) / mu;
        [w, dw, d2, d3]
    }

    /// Derivatives of the flux `q = mu(W) W'` in `xi`.
    fn flux_jet(&self, xi: f64, w: [f64; 4]) -> [f64; 4] {
        let mu = self.diffusivity.mu(w[0]);
        [
            mu * w[1],
            -0.5 * xi * w[1],
            -0.5 * w[1] - 0.5 * xi * w[2],
            -w[2] - 0.5 * xi * w[3],
        ]
    }

    pub fn xi(&self, t: f64, x: f64) -> f64 {
        (x - self.x0) / (1.0 + t).sqrt()
    }

    pub fn eval(&self, t: f64, x: f64, what: SimilarityQuantity) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be non-negative, got {t}")));
        }
        let d = self.field_derivs(t, x);
        Ok(match what {
            SimilarityQuantity::V => d.v,
            SimilarityQuantity::Vx => d.v_x,
            SimilarityQuantity::Vxx => d.v_xx,
            SimilarityQuantity::Vxxx => d.v_xxx,
            SimilarityQuantity::Vt => d.v_t,
            SimilarityQuantity::U => d.u,
            SimilarityQuantity::Ut => d.u_t,
        })
    }

    /// `V(t, x)` only.
    pub fn v(&self, t: f64, x: f64) -> f64 {
        self.jet(self.xi(t, x))[0]
    }

    pub fn field_derivs(&self, t: f64, x: f64) -> FieldDerivs {
        let tau = 1.0 + t;
        let xi = self.xi(t, x);
        let w = self.jet(xi);
        if xi.abs() >= self.xi_max || self.is_constant() {
            return FieldDerivs {
                v: w[0],
                ..FieldDerivs::default()
            };
        }
        let v = ScaledJet::new(0.0, w, xi);
        let u = ScaledJet::new(0.5, self.flux_jet(xi, w), xi);
        let vx = v.dx();
        let vxx = vx.dx();
        let ut = u.dt();
        let utt = ut.dt();
        FieldDerivs {
            v: w[0],
            v_x: vx.value(tau),
            v_xx: vxx.value(tau),
            v_xxx: vxx.dx().value(tau),
            v_t: v.dt().value(tau),
            v_xt: vx.dt().value(tau),
            v_xxt: vxx.dt().value(tau),
            u: u.value(tau),
            u_x: u.dx().value(tau),
            u_t: ut.value(tau),
            u_tx: ut.dx().value(tau),
            u_tt: utt.value(tau),
            u_ttx: utt.dx().value(tau),
        }
    }
}

/// `tau^(-a) f(xi)` with `xi = (x - x0) / sqrt(tau)`, `tau = 1 + t`, carrying
/// `[f, f', f'', f''']`. Each derivative consumes one order.
#[derive(Clone, Copy, Debug)]
struct ScaledJet {
    a: f64,
    f: [f64; 4],
    xi: f64,
}

impl ScaledJet {
    fn new(a: f64, f: [f64; 4], xi: f64) -> Self {
        Self { a, f, xi }
    }

    fn value(&self, tau: f64) -> f64 {
        tau.powf(-self.a) * self.f[0]
    }

    fn dx(&self) -> Self {
        Self {
            a: self.a + 0.5,
            f: [self.f[1], self.f[2], self.f[3], f64::NAN],
            xi: self.xi,
        }
    }

    fn dt(&self) -> Self {
        let mut g = [f64::NAN; 4];
        for k in 0..3 {
            g[k] = -self.a * self.f[k] - 0.5 * self.xi * self.f[k + 1] - 0.5 * k as f64 * self.f[k];
        }
        Self {
            a: self.a + 1.0,
            f: g,
            xi: self.xi,
        }
    }
}
