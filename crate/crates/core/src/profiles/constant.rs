use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::hermite::gaussian_derivatives;
use crate::math::quad::trapezoid;
use crate::models::{Grid1D, PressureLaw};

/// Largest `|v0 - v_bar|` tolerated at the ends of the grid.
pub const DECAY_TOLERANCE: f64 = 1e-12;

/// `mu = |p'(v_bar)| / alpha_bar`
pub fn mu_const(law: &PressureLaw, v_bar: f64, alpha_bar: f64) -> Result<f64> {
    if !(v_bar > 0.0) {
        return Err(Error::Domain(format!("v_bar must be positive, got {v_bar}")));
    }
    if !(alpha_bar > 0.0) {
        return Err(Error::Domain(format!("alpha_bar must be positive, got {alpha_bar}")));
    }
    Ok(law.eval(v_bar, 1)?.abs() / alpha_bar)
}

/// Gaussian mass that makes `v - V - v_hat` mass-free:
/// `delta_0 = int (v0 - v_bar) dx + (u+ - u-) / alpha_bar`.
pub fn select_delta0(
    v0: &[f64],
    v_bar: f64,
    u_minus: f64,
    u_plus: f64,
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
    let edge = (v0[0] - v_bar).abs().max((v0[v0.len() - 1] - v_bar).abs());
    if edge >= DECAY_TOLERANCE {
        return Err(Error::Truncation {
            what: "v0 - v_bar".into(),
            magnitude: edge,
        });
    }
    let excess: Vec<f64> = v0.iter().map(|v| v - v_bar).collect();
    Ok(trapezoid(&excess, grid.dx()) + (u_plus - u_minus) / alpha_bar)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaveQuantity {
    V,
    Vx,
    Vxx,
    Vxxx,
    U,
    Ut,
    Ux,
    Vt,
}

/// Heat-kernel profile `V = v_bar + delta_0 (4 pi mu (1+t))^(-1/2) exp(-x^2 / (4 mu (1+t)))`
/// with Darcy velocity `U = mu V_x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionWave {
    pub v_bar: f64,
    pub mu: f64,
    pub delta_0: f64,
}

impl DiffusionWave {
    pub fn new(v_bar: f64, mu: f64, delta_0: f64) -> Result<Self> {
        if !(v_bar > 0.0 && mu > 0.0 && delta_0.is_finite()) {
            return Err(Error::Domain(format!(
                "diffusion wave needs v_bar > 0, mu > 0 (got v_bar = {v_bar}, mu = {mu}, delta_0 = {delta_0})"
            )));
        }
        Ok(Self { v_bar, mu, delta_0 })
    }

    pub fn eval(&self, t: f64, x: f64, what: WaveQuantity) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be non-negative, got {t}")));
        }
        let d = self.x_derivatives::<5>(t, x);
        let mu = self.mu;
        Ok(match what {
            WaveQuantity::V => self.v_bar + d[0],
            WaveQuantity::Vx => d[1],
            WaveQuantity::Vxx => d[2],
            WaveQuantity::Vxxx => d[3],
            WaveQuantity::U => mu * d[1],
            WaveQuantity::Ut => mu * mu * d[3],
            WaveQuantity::Ux => mu * d[2],
            WaveQuantity::Vt => mu * d[2],
        })
    }

    /// `d^k/dx^k (V - v_bar)` for `k = 0..N`.
    pub fn x_derivatives<const N: usize>(&self, t: f64, x: f64) -> [f64; N] {
        let width2 = 4.0 * self.mu * (1.0 + t);
        let width = width2.sqrt();
        let amplitude = self.delta_0 / (PI * width2).sqrt();
        let mut d = gaussian_derivatives::<N>(x / width);
        let mut scale = amplitude;
        for dk in d.iter_mut() {
            *dk *= scale;
            scale /= width;
        }
        d
    }

    /// `V(t, x)`
    pub fn v(&self, t: f64, x: f64) -> f64 {
        self.v_bar + self.x_derivatives::<1>(t, x)[0]
    }

    /// Analytic `|| V(t) - v_bar ||_2 = |delta_0| (8 pi mu (1+t))^(-1/4)`.
    pub fn l2_excess(&self, t: f64) -> f64 {
        self.delta_0.abs() * (8.0 * PI * self.mu * (1.0 + t)).powf(-0.25)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_examples() {
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        assert_eq!(mu_const(&law, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(mu_const(&law, 1.0, 4.0).unwrap(), 0.5);
        let law = PressureLaw::new(1.0, 1.4).unwrap();
        let expected = 1.4 * 2f64.powf(-2.4);
        assert!((mu_const(&law, 2.0, 1.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.265251).abs() < 1e-6);
        assert!(mu_const(&law, 0.0, 1.0).is_err());
        assert!(mu_const(&law, 1.0, -1.0).is_err());
    }

    #[test]
    fn delta0_examples() {
        let grid = Grid1D::new(30.0, 3000).unwrap();
        let flat = vec![1.0; grid.n_cells()];
        assert_eq!(select_delta0(&flat, 1.0, 0.0, 0.0, 1.0, &grid).unwrap(), 0.0);
        assert_eq!(select_delta0(&flat, 1.0, 1.0, 0.0, 2.0, &grid).unwrap(), -0.5);

        // Gaussian excess with analytic mass 0.1
        let w = 1.5;
        let amp = 0.1 / (w * PI.sqrt());
        let v0 = grid.sample(|x| 1.0 + amp * (-(x / w).powi(2)).exp());
        assert!((select_delta0(&v0, 1.0, 0.0, 0.0, 1.0, &grid).unwrap() - 0.1).abs() < 1e-8);

        let short = Grid1D::new(3.0, 300).unwrap();
        let v0 = short.sample(|x| 1.0 + amp * (-(x / w).powi(2)).exp());
        assert!(matches!(
            select_delta0(&v0, 1.0, 0.0, 0.0, 1.0, &short),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn wave_examples() {
        let wave = DiffusionWave::new(1.0, 2.0, 1.0).unwrap();
        let v = wave.eval(0.0, 0.0, WaveQuantity::V).unwrap();
        assert!((v - (1.0 + (8.0 * PI).powf(-0.5))).abs() < 1e-15);
        assert!((v - 1.19947).abs() < 1e-5);
        assert_eq!(wave.eval(5.0, 0.0, WaveQuantity::U).unwrap(), 0.0);
        let vt = wave.eval(3.0, 1.7, WaveQuantity::Vt).unwrap();
        let vxx = wave.eval(3.0, 1.7, WaveQuantity::Vxx).unwrap();
        assert_eq!(vt, 2.0 * vxx);
        assert!(matches!(wave.eval(-1.0, 0.0, WaveQuantity::V), Err(Error::Domain(_))));
    }

    #[test]
    fn derivatives_match_differences() {
        let wave = DiffusionWave::new(1.0, 1.3, 0.7).unwrap();
        let h = 1e-4;
        for &(t, x) in &[(0.0, 0.3), (2.0, -1.1), (10.0, 4.0)] {
            let d = wave.x_derivatives::<4>(t, x);
            for k in 0..3 {
                let fd = (wave.x_derivatives::<4>(t, x + h)[k] - wave.x_derivatives::<4>(t, x - h)[k]) / (2.0 * h);
                assert!((fd - d[k + 1]).abs() < 1e-7, "k={k} t={t} x={x}");
            }
            let vt = wave.eval(t, x, WaveQuantity::Vt).unwrap();
            let fd_t = (wave.v(t + h, x) - wave.v(t - h, x.max(x))) / (2.0 * h);
            assert!((vt - fd_t).abs() < 1e-8);
        }
    }
}
