use crate::error::{Error, Result};
use crate::math::quad::{centered_difference, cumulative_trapezoid, three_point_derivative, trapezoid};
use crate::models::{FlowState, Grid1D};
use crate::profiles::{ReferenceSample, ReferenceSolution};

/// `v - V - v_hat` and `u - U - u_hat` on the grid.
pub fn deviations(state: &FlowState, reference: &ReferenceSample) -> (Vec<f64>, Vec<f64>) {
    let ev = state
        .v
        .iter()
        .zip(&reference.v_profile)
        .zip(&reference.v_hat)
        .map(|((v, vv), vh)| v - vv - vh)
        .collect();
    let eu = state
        .u
        .iter()
        .zip(&reference.u_profile)
        .zip(&reference.u_hat)
        .map(|((u, uu), uh)| u - uu - uh)
        .collect();
    (ev, eu)
}

/// `phi(t, x) = int_{-L}^{x} (v - V - v_hat) dy` by cumulative trapezoid.
pub fn phi_reconstruct(state: &FlowState, reference: &ReferenceSolution, grid: &Grid1D) -> Vec<f64> {
    let sample = reference.sample(state.t, grid);
    let (ev, _) = deviations(state, &sample);
    cumulative_trapezoid(&ev, grid.dx())
}

/// `int (v - V - v_hat) dx`
pub fn mass_defect(state: &FlowState, reference: &ReferenceSolution, grid: &Grid1D) -> f64 {
    let sample = reference.sample(state.t, grid);
    let (ev, _) = deviations(state, &sample);
    trapezoid(&ev, grid.dx())
}

/// Time and space derivatives of `phi_t` at one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiTimeDerivs {
    pub t: f64,
    pub phi_tt: Vec<f64>,
    pub phi_tx: Vec<f64>,
    pub phi_txx: Vec<f64>,
}

/// Three-point time derivative weights for snapshot `k` of `times`.
pub(crate) fn stencil(times: &[f64], k: usize) -> ([usize; 3], usize) {
    let n = times.len();
    if k == 0 {
        ([0, 1, 2], 0)
    } else if k == n - 1 {
        ([n - 3, n - 2, n - 1], 2)
    } else {
        ([k - 1, k, k + 1], 1)
    }
}

/// `phi_tt` by second-order differences of `phi_t` across snapshots (one-sided
/// at the first and last), `phi_tx`, `phi_txx` by centred differences in x.
pub fn time_derivatives(history: &[(f64, Vec<f64>)], dx: f64) -> Result<Vec<PhiTimeDerivs>> {
    if history.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "phi_tt needs at least 3 snapshots, got {}",
            history.len()
        )));
    }
    let times: Vec<f64> = history.iter().map(|h| h.0).collect();
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Data("snapshot times must be strictly increasing".into()));
    }
    Ok((0..history.len())
        .map(|k| {
            let (idx, at) = stencil(&times, k);
            let ts = idx.map(|j| times[j]);
            let n = history[k].1.len();
            let phi_tt = (0..n)
                .map(|i| three_point_derivative(ts, idx.map(|j| history[j].1[i]), at))
                .collect();
            let phi_tx = centered_difference(&history[k].1, dx);
            let phi_txx = centered_difference(&phi_tx, dx);
            PhiTimeDerivs {
                t: times[k],
                phi_tt,
                phi_tx,
                phi_txx,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::DampingField;
    use crate::profiles::{CorrectionFunction, DiffusionWave, Mollifier, Profile};

    fn reference() -> ReferenceSolution {
        ReferenceSolution::new(
            Profile::Diffusion(DiffusionWave::new(1.0, 2.0, 0.3).unwrap()),
            CorrectionFunction::new(Mollifier::default(), 0.1, -0.2, DampingField::constant(1.0).unwrap()),
        )
    }

    #[test]
    fn phi_of_exact_reference_vanishes() {
        let grid = Grid1D::new(40.0, 4000).unwrap();
        let r = reference();
        let s = r.sample(2.0, &grid);
        let v: Vec<f64> = s.v_profile.iter().zip(&s.v_hat).map(|(a, b)| a + b).collect();
        let u: Vec<f64> = s.u_profile.iter().zip(&s.u_hat).map(|(a, b)| a + b).collect();
        let state = FlowState::new(2.0, v, u).unwrap();
        assert!(phi_reconstruct(&state, &r, &grid).iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn phi_recovers_antiderivative() {
        let grid = Grid1D::new(2.0, 80_000).unwrap();
        let r = reference();
        let s = r.sample(0.5, &grid);
        // b(x) = (1 - x^2)^4 / 10 on |x| < 1, added through its derivative
        let b = |x: f64| if x.abs() < 1.0 { 0.1 * (1.0 - x * x).powi(4) } else { 0.0 };
        let db = |x: f64| if x.abs() < 1.0 { -0.8 * x * (1.0 - x * x).powi(3) } else { 0.0 };
        let v: Vec<f64> = (0..grid.n_cells())
            .map(|i| s.v_profile[i] + s.v_hat[i] + db(grid.x(i)))
            .collect();
        let state = FlowState::new(0.5, v, vec![0.0; grid.n_cells()]).unwrap();
        let phi = phi_reconstruct(&state, &r, &grid);
        let worst = (0..grid.n_cells()).map(|i| (phi[i] - b(grid.x(i))).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert!(mass_defect(&state, &r, &grid).abs() < 1e-12);
    }

    #[test]
    fn second_time_derivative_of_exponential() {
        let dx = 0.1;
        let g: Vec<f64> = (0..50).map(|i| (i as f64 * dx).sin()).collect();
        let history_for = |dt: f64| -> Vec<(f64, Vec<f64>)> {
            (0..6).map(|k| {
                let t = k as f64 * dt;
                (t, g.iter().map(|x| (-t).exp() * x).collect())
            })
            .collect()
        };
        let err = |dt: f64| {
            let d = time_derivatives(&history_for(dt), dx).unwrap();
            d.iter()
                .map(|s| {
                    s.phi_tt
                        .iter()
                        .zip(&g)
                        .map(|(a, x)| (a + (-s.t).exp() * x).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 < 1e-2 && e1 / e2 > 3.5, "{e1} {e2}");

        let constant: Vec<(f64, Vec<f64>)> = (0..4).map(|k| (k as f64, g.clone())).collect();
        assert!(time_derivatives(&constant, dx).unwrap().iter().all(|s| s.phi_tt.iter().all(|&v| v.abs() < 1e-14)));
        assert!(matches!(time_derivatives(&constant[..2], dx), Err(Error::InsufficientData(_))));
    }
}
