use std::f64::consts::PI;

use log::debug;

use super::{Diffusivity, SimilarityProfile};
use crate::error::{Error, Result};
use crate::math::ode::{integrate, OdeOptions, Outcome};
use crate::models::{EndStates, PressureLaw};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityOptions {
    pub xi_max: f64,
    pub n_nodes: usize,
    pub tol: f64,
}

impl Default for SimilarityOptions {
    fn default() -> Self {
        Self {
            xi_max: 12.0,
            n_nodes: 4096,
            tol: 1e-8,
        }
    }
}

const MAX_BISECTIONS: usize = 400;

fn ode_options() -> OdeOptions {
    OdeOptions {
        rtol: 1e-12,
        atol: 1e-24,
        max_steps: 200_000,
    }
}

/// Solve `(mu(W) W')' + (xi/2) W' = 0`, `W(-xi_max) = v-`, `W(xi_max) = v+`
/// with `mu = -p'/alpha_bar`.
pub fn similarity_solve(
    law: &PressureLaw,
    alpha_bar: f64,
    ends: &EndStates,
    opts: SimilarityOptions,
) -> Result<SimilarityProfile> {
    if !(alpha_bar > 0.0) {
        return Err(Error::Domain(format!("alpha_bar must be positive, got {alpha_bar}")));
    }
    let diffusivity = Diffusivity::Pressure {
        law: *law,
        alpha_bar,
    };
    SimilarityProfile::solve(diffusivity, ends.v_minus, ends.v_plus, opts)
}

impl SimilarityProfile {
    /// Shooting from `-xi_max` on the flux `q = mu(W) W'`, bisecting on `log q(-xi_max)`.
    pub fn solve(diffusivity: Diffusivity, v_minus: f64, v_plus: f64, opts: SimilarityOptions) -> Result<Self> {
        let SimilarityOptions { xi_max, n_nodes, tol } = opts;
        if !(v_minus > 0.0 && v_plus > 0.0) {
            return Err(Error::Domain(format!(
                "end states must be positive, got v- = {v_minus}, v+ = {v_plus}"
            )));
        }
        if !(xi_max > 0.0 && tol > 0.0) || n_nodes < 3 {
            return Err(Error::Argument(format!(
                "need xi_max > 0, tol > 0 and at least 3 nodes (got {xi_max}, {tol}, {n_nodes})"
            )));
        }
        if v_minus == v_plus {
            return SimilarityProfile::from_table(
                diffusivity,
                v_minus,
                v_plus,
                xi_max,
                vec![v_minus; n_nodes],
                vec![0.0; n_nodes],
            );
        }

        let (lo_v, hi_v) = (v_minus.min(v_plus), v_minus.max(v_plus));
        let mut mu_min = f64::INFINITY;
        let mut mu_max = 0.0f64;
        for k in 0..=64 {
            let mu = diffusivity.mu(lo_v + (hi_v - lo_v) * k as f64 / 64.0);
            mu_min = mu_min.min(mu);
            mu_max = mu_max.max(mu);
        }
        if !(mu_min > 0.0) {
            return Err(Error::Domain(format!(
                "diffusivity must be positive between the end states, min is {mu_min}"
            )));
        }
        let delta = hi_v - lo_v;
        let tail = tail_estimate(delta, mu_max, xi_max);
        if tail >= tol {
            return Err(Error::Solver(format!(
                "boundary mismatch: Gaussian tail at xi_max = {xi_max} is about {tail:.3e}, above tol = {tol:.1e}"
            )));
        }

        let sigma = (v_plus - v_minus).signum();
        let rhs = move |xi: f64, y: &[f64; 2]| {
            let mu = diffusivity.mu(y[0]);
            [y[1] / mu, -0.5 * xi * y[1] / mu]
        };
        let shoot = |eps: f64| -> Result<Option<f64>> {
            let out = integrate(rhs, -xi_max, [v_minus, sigma * eps], xi_max, ode_options(), |_, y| {
                sigma * (y[0] - v_plus) > 0.0
            })?;
            Ok(match out {
                Outcome::Reached(y) => Some(y[0] - v_plus),
                Outcome::Stopped { .. } => None,
            })
        };

        let mut hi = delta;
        if shoot(hi)?.is_some() {
            return Err(Error::Solver(format!(
                "shooting bracket: initial flux {hi:.3e} does not overshoot v+"
            )));
        }
        let mut lo = delta * 1e-3;
        let mut lo_miss = loop {
            match shoot(lo)? {
                Some(m) if sigma * m < 0.0 => break m,
                Some(m) if m.abs() < tol => break m,
                _ => {}
            }
            hi = lo;
            lo *= 1e-3;
            if lo < 1e-300 {
                return Err(Error::Solver(format!(
                    "shooting bracket: no undershooting flux found down to {lo:.3e}"
                )));
            }
        };

        let target = 1e-3 * tol;
        let mut iterations = 0;
        while lo_miss.abs() > target && iterations < MAX_BISECTIONS && hi / lo - 1.0 > 1e-15 {
            let mid = (lo * hi).sqrt();
            match shoot(mid)? {
                Some(m) if sigma * m <= 0.0 || m.abs() <= target => {
                    lo = mid;
                    lo_miss = m;
                }
                _ => hi = mid,
            }
            iterations += 1;
        }
        debug!("similarity shooting: flux {lo:.6e}, mismatch {lo_miss:.3e} after {iterations} bisections");
        if lo_miss.abs() >= tol {
            return Err(Error::Solver(format!(
                "shooting did not converge: bracket [{lo:.6e}, {hi:.6e}], mismatch {lo_miss:.3e} > tol {tol:.1e}"
            )));
        }

        let h = 2.0 * xi_max / (n_nodes - 1) as f64;
        let mut values = Vec::with_capacity(n_nodes);
        let mut slopes = Vec::with_capacity(n_nodes);
        let mut y = [v_minus, sigma * lo];
        for i in 0..n_nodes {
            let xi = -xi_max + i as f64 * h;
            if i > 0 {
                let from = -xi_max + (i - 1) as f64 * h;
                y = match integrate(rhs, from, y, xi, ode_options(), |_, _| false)? {
                    Outcome::Reached(y) => y,
                    Outcome::Stopped { y, .. } => y,
                };
            }
            if sigma * (y[0] - v_plus) > tol || sigma * (v_minus - y[0]) > tol {
                return Err(Error::Solver(format!(
                    "non-monotone iterate: W({xi:.4}) = {} leaves [{lo_v}, {hi_v}]",
                    y[0]
                )));
            }
            values.push(y[0]);
            slopes.push(y[1] / diffusivity.mu(y[0]));
        }
        if slopes.iter().any(|&d| sigma * d < 0.0) {
            return Err(Error::Solver("non-monotone iterate: slope changes sign".into()));
        }

        let mut profile = SimilarityProfile::from_table(diffusivity, v_minus, v_plus, xi_max, values, slopes)?;
        let tails = [0, n_nodes - 1].map(|i| {
            let w = profile.values()[i];
            profile.slopes()[i].abs() * 2.0 * diffusivity.mu(w) / xi_max
        });
        let mismatch = profile.boundary_mismatch().max(tails[0]).max(tails[1]);
        profile.set_boundary_mismatch(mismatch);
        if mismatch >= tol {
            return Err(Error::Solver(format!(
                "boundary mismatch {mismatch:.3e} exceeds tol {tol:.1e}"
            )));
        }
        Ok(profile)
    }
}

/// Mass of a Gaussian profile with diffusivity `mu` left outside `[-xi_max, xi_max]`.
fn tail_estimate(delta: f64, mu: f64, xi_max: f64) -> f64 {
    delta * (mu / PI).sqrt() / xi_max * (-xi_max * xi_max / (4.0 * mu)).exp()
}
