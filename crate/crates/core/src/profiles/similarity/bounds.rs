use super::SimilarityProfile;
use crate::error::{Error, Result};

/// Cap on the bound constant `C`.
pub const C_CAP: f64 = 100.0;
const C_STEP: f64 = 0.01;
const C_SCAN_MAX: usize = 1000;

/// Fitted constants of the Gaussian bounds
/// `|W - v-|, |W - v+|, |W'|, |W''|, |W'''| <= C delta_0 exp(-c xi^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBoundFit {
    pub c_big: f64,
    pub c_fit: f64,
    /// Smallest decay rate accepted as genuinely Gaussian on this table.
    pub c_floor: f64,
    pub pass: bool,
}

impl SimilarityProfile {
    /// Scan `c = 0.01 k` for the largest rate whose bound holds with `C <= 100`.
    pub fn gaussian_bound_check(&self) -> Result<GaussianBoundFit> {
        let n = self.n_nodes();
        if n < 3 {
            return Err(Error::State(format!("profile table has only {n} nodes")));
        }
        let xi_max = self.xi_max();
        let c_floor = 2.0 * C_CAP.ln() / (xi_max * xi_max);
        let delta0 = self.delta0();
        if self.is_constant() {
            return Ok(GaussianBoundFit {
                c_big: 0.0,
                c_fit: C_STEP * C_SCAN_MAX as f64,
                c_floor,
                pass: true,
            });
        }

        // (xi^2, largest left-hand side over the five bounds)
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let xi = self.node(i);
                let [w, d1, d2, d3] = self.ode_jet(xi, self.values()[i], self.slopes()[i]);
                let far = if xi < 0.0 { self.v_minus() } else { self.v_plus() };
                let lhs = (w - far).abs().max(d1.abs()).max(d2.abs()).max(d3.abs());
                (xi * xi, lhs)
            })
            .collect();
        let constant_for = |c: f64| {
            samples
                .iter()
                .map(|&(xi2, lhs)| lhs / (delta0 * (-c * xi2).exp()))
                .fold(0.0, f64::max)
        };

        let mut fit = GaussianBoundFit {
            c_big: constant_for(0.0),
            c_fit: 0.0,
            c_floor,
            pass: false,
        };
        for k in 1..=C_SCAN_MAX {
            let c = C_STEP * k as f64;
            let big = constant_for(c);
            if !(big <= C_CAP) {
                break;
            }
            fit.c_fit = c;
            fit.c_big = big;
        }
        fit.pass = fit.c_fit > c_floor && fit.c_big <= C_CAP;
        Ok(fit)
    }
}
