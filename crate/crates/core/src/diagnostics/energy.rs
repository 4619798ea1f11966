use super::norms::{first_difference, second_difference, sq_l2};
use crate::error::{Error, Result};
use crate::math::quad::centered_difference;

/// Which asymptotic profile the run is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    ConstState,
    Similarity,
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::ConstState => "const_state",
            Case::Similarity => "similarity",
        }
    }
}

impl std::str::FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "const_state" => Ok(Case::ConstState),
            "similarity" => Ok(Case::Similarity),
            other => Err(Error::Argument(format!("unknown case {other:?}"))),
        }
    }
}

/// Relative agreement required between the `h` and `2h` stencils of a third-order term.
pub const RESOLUTION_TOLERANCE: f64 = 0.01;

/// Squared L2 norms of the phi family at one snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyParts {
    pub phi2: f64,
    pub phix2: f64,
    pub phixx2: f64,
    pub phixxx2: f64,
    pub phit2: f64,
    pub phitx2: f64,
    pub phitxx2: f64,
    pub phitt2: f64,
    pub phittx2: f64,
    /// Whether `phi_xxx`, `phi_txx` and `phi_ttx` are resolved to two digits.
    pub resolved: bool,
}

fn stencil_agree(a: f64, b: f64) -> bool {
    let scale = a.max(b);
    scale == 0.0 || (a.sqrt() - b.sqrt()).abs() <= RESOLUTION_TOLERANCE * scale.sqrt()
}

impl EnergyParts {
    /// From `phi`, `phi_x = v - V - v_hat`, `phi_t = u - U - u_hat` and `phi_tt`.
    pub fn compute(phi: &[f64], phi_x: &[f64], phi_t: &[f64], phi_tt: &[f64], dx: f64) -> Self {
        let phixx = centered_difference(phi_x, dx);
        let phitx = centered_difference(phi_t, dx);
        let phixxx = second_difference(phi_x, dx, 1);
        let phitxx = second_difference(phi_t, dx, 1);
        let phittx = first_difference(phi_tt, dx, 1);
        let coarse = [
            sq_l2(&second_difference(phi_x, dx, 2), dx),
            sq_l2(&second_difference(phi_t, dx, 2), dx),
            sq_l2(&first_difference(phi_tt, dx, 2), dx),
        ];
        let mut p = EnergyParts {
            phi2: sq_l2(phi, dx),
            phix2: sq_l2(phi_x, dx),
            phixx2: sq_l2(&phixx, dx),
            phixxx2: sq_l2(&phixxx, dx),
            phit2: sq_l2(phi_t, dx),
            phitx2: sq_l2(&phitx, dx),
            phitxx2: sq_l2(&phitxx, dx),
            phitt2: sq_l2(phi_tt, dx),
            phittx2: sq_l2(&phittx, dx),
            resolved: false,
        };
        p.resolved = [p.phixxx2, p.phitxx2, p.phittx2]
            .iter()
            .zip(coarse)
            .all(|(&a, b)| stencil_agree(a, b));
        p
    }

    /// Copy with the third-order terms zeroed.
    pub fn reduced(&self) -> Self {
        Self {
            phixxx2: 0.0,
            phitxx2: 0.0,
            phittx2: 0.0,
            ..*self
        }
    }

    /// `||(phi, phi_t)||^2` in `H^3 x H^2`
    pub fn initial_norm2(&self) -> f64 {
        self.phi2 + self.phix2 + self.phixx2 + self.phixxx2 + self.phit2 + self.phitx2 + self.phitxx2
    }
}

/// Pointwise functional, time-integrand and smallness functional at time `t`.
fn weighted(case: Case, gamma_w: f64, t: f64, p: &EnergyParts) -> (f64, f64, f64) {
    let s = 1.0 + t;
    match case {
        Case::ConstState => {
            let e = s * s * (p.phitt2 + p.phittx2 + p.phit2 + p.phitx2 + p.phitxx2 + p.phixx2 + p.phixxx2)
                + s * p.phix2
                + p.phi2;
            let integrand = s * s * (p.phitt2 + p.phitx2 + p.phitxx2) + s * (p.phit2 + p.phixx2) + p.phix2;
            let delta = p.initial_norm2().sqrt() + s * (p.phitx2 + p.phitxx2).sqrt();
            (e, integrand, delta)
        }
        Case::Similarity => {
            let e = s.powf(-gamma_w) * p.phi2
                + s.powf(1.0 - gamma_w) * p.phix2
                + s * (p.phit2 + p.phitx2 + p.phitxx2 + p.phitt2 + p.phittx2 + p.phixx2 + p.phixxx2);
            let integrand = s.powf(-1.0 - gamma_w) * p.phi2
                + s.powf(-gamma_w) * p.phix2
                + s.powf(1.0 - gamma_w) * p.phit2
                + s * (p.phitt2 + p.phitx2)
                + p.phittx2
                + p.phitxx2;
            let delta = s.powf(-gamma_w / 2.0) * p.phi2.sqrt()
                + (p.phit2 + p.phitx2 + p.phitxx2 + p.phix2 + p.phixx2 + p.phixxx2).sqrt()
                + s.sqrt() * (p.phitxx2 + p.phixxx2).sqrt();
            (e, integrand, delta)
        }
    }
}

/// Whether the third-order terms took part in the functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyFamily {
    Full,
    Reduced,
}

impl EnergyFamily {
    pub fn name(&self) -> &'static str {
        match self {
            EnergyFamily::Full => "full",
            EnergyFamily::Reduced => "reduced",
        }
    }
}

/// Energy functional along a run.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergySeries {
    pub t: Vec<f64>,
    pub e: Vec<f64>,
    /// Trapezoid accumulation of the time-integral terms.
    pub e_integral: Vec<f64>,
    /// Running maximum of the a-priori smallness functional.
    pub delta_sup: Vec<f64>,
    pub delta_1: f64,
    /// `||(phi_0, phi_1)||^2 + delta_1`
    pub i0: f64,
    pub family: EnergyFamily,
}

impl EnergySeries {
    /// `delta_sup` must stay below `DELTA_CAP_FACTOR * sqrt(I0)`.
    pub fn delta_cap(&self) -> f64 {
        DELTA_CAP_FACTOR * self.i0.sqrt()
    }
}

pub const DELTA_CAP_FACTOR: f64 = 10.0;

/// Evaluate the weighted energy functional of either case on a history of parts.
pub fn energy_functional(
    history: &[(f64, EnergyParts)],
    case: Case,
    gamma_w: f64,
    delta_1: f64,
) -> Result<EnergySeries> {
    if case == Case::Similarity && !(gamma_w > 0.5 && gamma_w < 1.0) {
        return Err(Error::Argument(format!("gamma_w = {gamma_w} must satisfy 1/2 < gamma < 1")));
    }
    if history.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Data("energy history times must be strictly increasing".into()));
    }
    let family = if history.iter().all(|(_, p)| p.resolved) {
        EnergyFamily::Full
    } else {
        EnergyFamily::Reduced
    };
    let pick = |p: &EnergyParts| if family == EnergyFamily::Full { *p } else { p.reduced() };

    let mut out = EnergySeries {
        t: Vec::with_capacity(history.len()),
        e: Vec::with_capacity(history.len()),
        e_integral: Vec::with_capacity(history.len()),
        delta_sup: Vec::with_capacity(history.len()),
        delta_1,
        i0: history.first().map_or(0.0, |(_, p)| pick(p).initial_norm2()) + delta_1,
        family,
    };
    let (mut acc, mut sup) = (0.0, 0.0f64);
    let mut prev: Option<(f64, f64)> = None;
    for (t, p) in history {
        let (e, integrand, delta) = weighted(case, gamma_w, *t, &pick(p));
        if let Some((tp, ip)) = prev {
            acc += 0.5 * (t - tp) * (integrand + ip);
        }
        prev = Some((*t, integrand));
        sup = sup.max(delta);
        out.t.push(*t);
        out.e.push(e);
        out.e_integral.push(acc);
        out.delta_sup.push(sup);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(scale: f64) -> EnergyParts {
        EnergyParts {
            phi2: scale,
            phix2: scale,
            phixx2: scale,
            phixxx2: scale,
            phit2: scale,
            phitx2: scale,
            phitxx2: scale,
            phitt2: scale,
            phittx2: scale,
            resolved: true,
        }
    }

    #[test]
    fn zero_history() {
        let h: Vec<_> = (0..5).map(|k| (k as f64, EnergyParts { resolved: true, ..Default::default() })).collect();
        let s = energy_functional(&h, Case::ConstState, 0.0, 0.3).unwrap();
        assert!(s.e.iter().chain(&s.e_integral).chain(&s.delta_sup).all(|&v| v == 0.0));
        assert_eq!(s.i0, 0.3);
    }

    #[test]
    fn gamma_range() {
        let h = [(0.0, parts(1.0))];
        assert!(matches!(energy_functional(&h, Case::Similarity, 0.4, 0.0), Err(Error::Argument(_))));
        assert!(matches!(energy_functional(&h, Case::Similarity, 1.0, 0.0), Err(Error::Argument(_))));
        assert!(energy_functional(&h, Case::ConstState, 0.4, 0.0).is_ok());
    }

    #[test]
    fn larger_gamma_gives_smaller_phi_term() {
        let only_phi = EnergyParts { phi2: 1.0, resolved: true, ..Default::default() };
        let h = [(0.0, only_phi), (10.0, only_phi)];
        let a = energy_functional(&h, Case::Similarity, 0.75, 0.0).unwrap();
        let b = energy_functional(&h, Case::Similarity, 0.6, 0.0).unwrap();
        assert!(a.e[1] < b.e[1]);
        assert_eq!(a.e[0], b.e[0]);
    }

    #[test]
    fn const_weights_and_integral() {
        let h = [(0.0, parts(1.0)), (1.0, parts(1.0))];
        let s = energy_functional(&h, Case::ConstState, 0.0, 0.0).unwrap();
        assert_eq!(s.e[0], 7.0 + 1.0 + 1.0);
        assert_eq!(s.e[1], 4.0 * 7.0 + 2.0 + 1.0);
        // integrands 3 + 2 + 1 = 6 at t = 0 and 12 + 4 + 1 = 17 at t = 1
        assert!((s.e_integral[1] - 11.5).abs() < 1e-15);
        assert_eq!(s.i0, 7.0);
        assert_eq!(s.family, EnergyFamily::Full);
    }

    #[test]
    fn unresolved_rows_reduce_the_family() {
        let mut rough = parts(1.0);
        rough.resolved = false;
        let s = energy_functional(&[(0.0, parts(1.0)), (1.0, rough)], Case::ConstState, 0.0, 0.0).unwrap();
        assert_eq!(s.family, EnergyFamily::Reduced);
        assert_eq!(s.e[0], 4.0 + 1.0 + 1.0);
    }

    #[test]
    fn smooth_fields_are_resolved() {
        let n = 4000;
        let dx = 20.0 / n as f64;
        let xs: Vec<f64> = (0..n).map(|i| -10.0 + (i as f64 + 0.5) * dx).collect();
        let g: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        let p = EnergyParts::compute(&g, &g, &g, &g, dx);
        assert!(p.resolved);
        let mut noisy = g.clone();
        for (i, v) in noisy.iter_mut().enumerate() {
            *v += if i % 2 == 0 { 1e-3 } else { -1e-3 };
        }
        assert!(!EnergyParts::compute(&g, &noisy, &g, &g, dx).resolved);
    }
}
