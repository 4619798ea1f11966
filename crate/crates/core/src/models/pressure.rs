use crate::error::{Error, Result};

/// Gamma-law pressure `p(v) = p_ref * v^(-gamma_p)` for specific volume `v > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureLaw {
    p_ref: f64,
    gamma_p: f64,
    // exact integer exponent, when there is one, lets the hot loops use powi
    int_gamma: Option<i32>,
}

impl PressureLaw {
    pub fn new(p_ref: f64, gamma_p: f64) -> Result<Self> {
        if !(p_ref > 0.0 && p_ref.is_finite()) {
            return Err(Error::Domain(format!("p_ref must be positive, got {p_ref}")));
        }
        if !(gamma_p >= 1.0 && gamma_p.is_finite()) {
            return Err(Error::Domain(format!("gamma_p must be >= 1, got {gamma_p}")));
        }
        let int_gamma = (gamma_p.fract() == 0.0 && gamma_p <= 32.0).then_some(gamma_p as i32);
        Ok(Self {
            p_ref,
            gamma_p,
            int_gamma,
        })
    }

    pub fn p_ref(&self) -> f64 {
        self.p_ref
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma_p
    }

    /// `p^(order)(v)` for `order` in `0..=3`.
    pub fn eval(&self, v: f64, order: u32) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("specific volume must be positive, got {v}")));
        }
        if order > 3 {
            return Err(Error::Argument(format!("pressure derivative order {order} outside 0..=3")));
        }
        Ok(self.derivative(v, order))
    }

    /// Unchecked `p^(k)(v)` for any `k`; `v` must be positive.
    #[inline]
    pub fn derivative(&self, v: f64, k: u32) -> f64 {
        let mut coeff = self.p_ref;
        for j in 0..k {
            coeff *= -(self.gamma_p + j as f64);
        }
        coeff * self.inv_pow(v, k)
    }

    /// `[p, p', p'', p''']` at `v`.
    #[inline]
    pub fn derivatives(&self, v: f64) -> [f64; 4] {
        let g = self.gamma_p;
        let p = self.pressure(v);
        let r = 1.0 / v;
        let d1 = -g * p * r;
        let d2 = -(g + 1.0) * d1 * r;
        let d3 = -(g + 2.0) * d2 * r;
        [p, d1, d2, d3]
    }

    #[inline]
    pub fn pressure(&self, v: f64) -> f64 {
        self.p_ref * self.inv_pow(v, 0)
    }

    /// Characteristic speed `sqrt(-p'(v))`.
    #[inline]
    pub fn sound_speed(&self, v: f64) -> f64 {
        (self.gamma_p * self.pressure(v) / v).sqrt()
    }

    /// Relative potential `int_{v_ref}^{v} (p(v_ref) - p(s)) ds >= 0`.
    pub fn relative_potential(&self, v: f64, v_ref: f64) -> f64 {
        let g = self.gamma_p;
        let antiderivative = |s: f64| {
            if g == 1.0 {
                self.p_ref * s.ln()
            } else {
                self.p_ref * s.powf(1.0 - g) / (1.0 - g)
            }
        };
        self.pressure(v_ref) * (v - v_ref) - (antiderivative(v) - antiderivative(v_ref))
    }

    #[inline]
    fn inv_pow(&self, v: f64, extra: u32) -> f64 {
        match self.int_gamma {
            Some(n) => v.powi(-(n + extra as i32)),
            None => v.powf(-(self.gamma_p + extra as f64)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        assert_eq!(law.eval(1.0, 0).unwrap(), 1.0);
        assert_eq!(law.eval(1.0, 1).unwrap(), -2.0);
        assert_eq!(law.eval(1.0, 2).unwrap(), 6.0);
        assert_eq!(law.eval(1.0, 3).unwrap(), -24.0);
    }

    #[test]
    fn second_derivative_matches_difference_of_first() {
        let law = PressureLaw::new(1.0, 1.5).unwrap();
        let h = 1e-4;
        let fd = (law.eval(2.0 + h, 1).unwrap() - law.eval(2.0 - h, 1).unwrap()) / (2.0 * h);
        let exact = law.eval(2.0, 2).unwrap();
        assert!(((fd - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        assert!(matches!(law.eval(0.0, 0), Err(Error::Domain(_))));
        assert!(matches!(law.eval(-1.0, 1), Err(Error::Domain(_))));
        assert!(matches!(law.eval(1.0, 4), Err(Error::Argument(_))));
        assert!(PressureLaw::new(0.0, 2.0).is_err());
        assert!(PressureLaw::new(1.0, 0.5).is_err());
    }

    #[test]
    fn fast_paths_agree() {
        let int = PressureLaw::new(1.3, 2.0).unwrap();
        for &v in &[0.5, 1.0, 1.7] {
            let d = int.derivatives(v);
            for k in 0..4 {
                let slow = 1.3 * (0..k).fold(1.0, |c, j| c * -(2.0 + j as f64)) * v.powf(-(2.0 + k as f64));
                assert!((d[k] - slow).abs() < 1e-12 * slow.abs().max(1.0));
                assert!((int.derivative(v, k as u32) - slow).abs() < 1e-12 * slow.abs().max(1.0));
            }
            assert!((int.sound_speed(v) - (-d[1]).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn relative_potential_is_nonnegative_with_derivative() {
        for &g in &[1.0, 1.4, 2.0] {
            let law = PressureLaw::new(1.0, g).unwrap();
            assert!(law.relative_potential(1.0, 1.0).abs() < 1e-15);
            for &v in &[0.5, 0.9, 1.3, 2.5] {
                assert!(law.relative_potential(v, 1.0) > 0.0);
                let h = 1e-6;
                let d = (law.relative_potential(v + h, 1.0) - law.relative_potential(v - h, 1.0)) / (2.0 * h);
                assert!((d - (law.pressure(1.0) - law.pressure(v))).abs() < 1e-7);
            }
        }
    }
}
