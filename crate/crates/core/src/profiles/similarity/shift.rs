use super::SimilarityProfile;
use crate::error::{Error, Result};
use crate::math::quad::trapezoid;
use crate::models::{EndStates, Grid1D};

/// Shift `x0` with `int (v0(x) - W(x - x0)) dx = -(u+ - u-) / alpha_bar`, by bisection on `[-L/2, L/2]`.
pub fn shift_select(
    v0: &[f64],
    profile: &SimilarityProfile,
    ends: &EndStates,
    alpha_bar: f64,
    grid: &Grid1D,
) -> Result<f64> {
    if v0.len() != grid.n_cells() {
        return Err(Error::Argument(format!(
            "initial volume has {} samples, grid has {} cells",
            v0.len(),
            grid.n_cells()
        )));
    }
    if ends.v_plus == ends.v_minus {
        return Err(Error::Argument("shift selection needs v+ != v-".into()));
    }
    let xs = grid.centers();
    let rhs = -(ends.u_plus - ends.u_minus) / alpha_bar;
    let mut excess = vec![0.0; xs.len()];
    let mut defect = |x0: f64| {
        for ((e, &x), &v) in excess.iter_mut().zip(&xs).zip(v0) {
            *e = v - profile.jet(x - x0)[0];
        }
        trapezoid(&excess, grid.dx()) - rhs
    };

    let half = 0.5 * grid.half_length();
    let (mut a, mut b) = (-half, half);
    let (fa, fb) = (defect(a), defect(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Range(format!(
            "mass equation not bracketed on [{a}, {b}]: defects {fa:.3e}, {fb:.3e}"
        )));
    }
    let mut fa_sign = fa.signum();
    while b - a > 1e-13 * (1.0 + half) {
        let mid = 0.5 * (a + b);
        let fm = defect(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa_sign {
            a = mid;
            fa_sign = fm.signum();
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::super::{similarity_solve, SimilarityOptions};
    use super::*;
    use crate::models::PressureLaw;

    fn setup() -> (SimilarityProfile, Grid1D) {
        let ends = EndStates::new(1.0, 1.2, 0.0, 0.0).unwrap();
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        let p = similarity_solve(&law, 1.0, &ends, SimilarityOptions::default()).unwrap();
        (p, Grid1D::new(40.0, 8000).unwrap())
    }

    #[test]
    fn recovers_known_shift() {
        let (p, grid) = setup();
        let ends = EndStates::new(1.0, 1.2, 0.3, 0.3).unwrap();
        let v0 = grid.sample(|x| p.jet(x - 3.0)[0]);
        let x0 = shift_select(&v0, &p, &ends, 1.0, &grid).unwrap();
        assert!((x0 - 3.0).abs() < 1e-6, "{x0}");
        let v0 = grid.sample(|x| p.jet(x)[0]);
        assert!(shift_select(&v0, &p, &ends, 1.0, &grid).unwrap().abs() < 1e-9);
    }

    #[test]
    fn linearised_velocity_shift() {
        let (p, grid) = setup();
        let v0 = grid.sample(|x| p.jet(x)[0]);
        let alpha_bar = 1.5;
        for &s in &[1e-3, 1e-2, 0.1] {
            let ends = EndStates::new(1.0, 1.2, 0.0, alpha_bar * 0.2 * s).unwrap();
            let x0 = shift_select(&v0, &p, &ends, alpha_bar, &grid).unwrap();
            assert!((x0 + s).abs() < 1e-8 + s * s, "s={s} x0={x0}");
        }
    }

    #[test]
    fn unbracketed_root() {
        let (p, grid) = setup();
        let ends = EndStates::new(1.0, 1.2, 0.0, 100.0).unwrap();
        let v0 = grid.sample(|x| p.jet(x)[0]);
        assert!(matches!(shift_select(&v0, &p, &ends, 1.0, &grid), Err(Error::Range(_))));
    }
}
