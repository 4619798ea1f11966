use super::constant::DiffusionWave;
use super::correction::CorrectionFunction;
use super::similarity::SimilarityProfile;
use crate::models::Grid1D;

/// Closed-form space-time derivatives of an asymptotic profile `(V, U)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldDerivs {
    pub v: f64,
    pub v_x: f64,
    pub v_xx: f64,
    pub v_xxx: f64,
    pub v_t: f64,
    pub v_xt: f64,
    pub v_xxt: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_t: f64,
    pub u_tx: f64,
    pub u_tt: f64,
    pub u_ttx: f64,
}

impl DiffusionWave {
    /// Uses `d/dt = mu d^2/dx^2` on every derivative of the heat kernel.
    pub fn field_derivs(&self, t: f64, x: f64) -> FieldDerivs {
        let d = self.x_derivatives::<7>(t, x);
        let mu = self.mu;
        let mu2 = mu * mu;
        let mu3 = mu2 * mu;
        FieldDerivs {
            v: self.v_bar + d[0],
            v_x: d[1],
            v_xx: d[2],
            v_xxx: d[3],
            v_t: mu * d[2],
            v_xt: mu * d[3],
            v_xxt: mu * d[4],
            u: mu * d[1],
            u_x: mu * d[2],
            u_t: mu2 * d[3],
            u_tx: mu2 * d[4],
            u_tt: mu3 * d[5],
            u_ttx: mu3 * d[6],
        }
    }
}

/// Asymptotic profile for either end-state configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Diffusion(DiffusionWave),
    Similarity(SimilarityProfile),
}

impl Profile {
    pub fn field_derivs(&self, t: f64, x: f64) -> FieldDerivs {
        match self {
            Profile::Diffusion(w) => w.field_derivs(t, x),
            Profile::Similarity(p) => p.field_derivs(t, x),
        }
    }

    /// `V(t, x)`
    pub fn v(&self, t: f64, x: f64) -> f64 {
        match self {
            Profile::Diffusion(w) => w.v(t, x),
            Profile::Similarity(p) => p.v(t, x),
        }
    }

    pub fn is_similarity(&self) -> bool {
        matches!(self, Profile::Similarity(_))
    }
}

/// Profile plus correction: the reference `(V + v_hat, U + u_hat)` that the
/// solution approaches.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSolution {
    pub profile: Profile,
    pub correction: CorrectionFunction,
}

/// Reference fields sampled on a grid at one time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReferenceSample {
    pub v_profile: Vec<f64>,
    pub u_profile: Vec<f64>,
    pub v_hat: Vec<f64>,
    pub u_hat: Vec<f64>,
}

impl ReferenceSolution {
    pub fn new(profile: Profile, correction: CorrectionFunction) -> Self {
        Self { profile, correction }
    }

    pub fn sample(&self, t: f64, grid: &Grid1D) -> ReferenceSample {
        let n = grid.n_cells();
        let mut s = ReferenceSample {
            v_profile: Vec::with_capacity(n),
            u_profile: Vec::with_capacity(n),
            v_hat: Vec::with_capacity(n),
            u_hat: Vec::with_capacity(n),
        };
        for i in 0..n {
            let x = grid.x(i);
            let (vv, uu) = match &self.profile {
                Profile::Diffusion(w) => {
                    let d = w.x_derivatives::<2>(t, x);
                    (w.v_bar + d[0], w.mu * d[1])
                }
                Profile::Similarity(p) => {
                    let d = p.field_derivs(t, x);
                    (d.v, d.u)
                }
            };
            let c = self.correction.derivs(t, x);
            s.v_profile.push(vv);
            s.u_profile.push(uu);
            s.v_hat.push(c.v_hat[0]);
            s.u_hat.push(c.u_hat[0]);
        }
        s
    }
}
