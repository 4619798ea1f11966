use crate::error::{Error, Result};
use crate::math::jet::Jet;
use crate::math::quad::trapezoid;
use crate::models::{DampingField, Grid1D, SUPPORT_TOLERANCE};

const NORM: f64 = 315.0 / 256.0;

/// Unit-mass polynomial bump `c (1 - s^2)^4`, `s = (x - center) / width`,
/// supported on `|s| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    width: f64,
    center: f64,
}

impl Mollifier {
    pub fn new(width: f64, center: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::Domain(format!(
                "mollifier needs a positive width and finite centre, got w = {width}, c = {center}"
            )));
        }
        Ok(Self { width, center })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// `[int_{-inf}^x m0, m0, m0', m0'']`
    pub fn jet(&self, x: f64) -> [f64; 4] {
        let w = self.width;
        let s = (x - self.center) / w;
        if s <= -1.0 {
            return [0.0; 4];
        }
        if s >= 1.0 {
            return [1.0, 0.0, 0.0, 0.0];
        }
        let s2 = s * s;
        let r = 1.0 - s2;
        let r2 = r * r;
        let r3 = r2 * r;
        let c = NORM / w;
        let p = s * (1.0 + s2 * (-4.0 / 3.0 + s2 * (6.0 / 5.0 + s2 * (-4.0 / 7.0 + s2 / 9.0))));
        [
            0.5 + NORM * p,
            c * r2 * r2,
            -8.0 * c * s * r3 / w,
            c * (-8.0 * r3 + 48.0 * s2 * r2) / (w * w),
        ]
    }

    pub fn density(&self, x: f64) -> f64 {
        self.jet(x)[1]
    }
}

impl Default for Mollifier {
    fn default() -> Self {
        Self {
            width: 1.0,
            center: 0.0,
        }
    }
}

/// Closed-form x-derivatives of the correction pair at one `(t, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionDerivs {
    /// `[v_hat, v_hat_x, v_hat_xx]`
    pub v_hat: [f64; 3],
    /// `[u_hat, u_hat_x, u_hat_xx, u_hat_xxx]`; also the t-derivatives of `v_hat`.
    pub u_hat: [f64; 4],
}

/// `u_hat = exp(-alpha t) M0`, `v_hat = d/dx (-u_hat / alpha)`, where `M0`
/// interpolates `u-` to `u+` through the mollifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionFunction {
    mollifier: Mollifier,
    u_minus: f64,
    u_plus: f64,
    field: DampingField,
}

impl CorrectionFunction {
    pub fn new(mollifier: Mollifier, u_minus: f64, u_plus: f64, field: DampingField) -> Self {
        Self {
            mollifier,
            u_minus,
            u_plus,
            field,
        }
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    pub fn field(&self) -> &DampingField {
        &self.field
    }

    pub fn velocity_jump(&self) -> f64 {
        self.u_plus - self.u_minus
    }

    /// `[M0, M0', M0'', M0''']`
    fn m0_jet(&self, x: f64) -> Jet {
        let du = self.velocity_jump();
        let [int, m, dm, d2m] = self.mollifier.jet(x);
        Jet([self.u_minus + du * int, du * m, du * dm, du * d2m])
    }

    /// `(v_hat, u_hat)` at `(t, x)`.
    pub fn eval(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be non-negative, got {t}")));
        }
        let alpha = self.field.alpha(x);
        let alpha_x = self.field.derivative(x, 1);
        let [big_m, m, _, _] = self.m0_jet(x).0;
        let decay = (-alpha * t).exp();
        let u_hat = decay * big_m;
        let v_hat = decay / (-alpha) * (m - alpha_x * big_m * (1.0 / alpha + t));
        Ok((v_hat, u_hat))
    }

    /// x-derivatives of `v_hat` to second order and of `u_hat` to third order.
    pub fn derivs(&self, t: f64, x: f64) -> CorrectionDerivs {
        let alpha = Jet(self.field.jet(x));
        let u_hat = self.m0_jet(x) * alpha.scale(-t).exp();
        let q = -(u_hat * alpha.recip());
        CorrectionDerivs {
            v_hat: [q.0[1], q.0[2], q.0[3]],
            u_hat: u_hat.0,
        }
    }

    /// `u_hat_t = -alpha u_hat`
    pub fn u_hat_t(&self, t: f64, x: f64) -> f64 {
        let alpha = self.field.alpha(x);
        -alpha * (-alpha * t).exp() * self.m0_jet(x).0[0]
    }

    /// `v_hat_t` by differentiating the closed form of `v_hat` in t.
    pub fn v_hat_t(&self, t: f64, x: f64) -> f64 {
        let alpha = self.field.alpha(x);
        let alpha_x = self.field.derivative(x, 1);
        let [big_m, m, _, _] = self.m0_jet(x).0;
        let decay = (-alpha * t).exp();
        let b = m - alpha_x * big_m * (1.0 / alpha + t);
        decay * b + decay / (-alpha) * (-alpha_x * big_m)
    }

    /// `u_hat_x` by differentiating the closed form of `u_hat` in x.
    pub fn u_hat_x(&self, t: f64, x: f64) -> f64 {
        let alpha = self.field.alpha(x);
        let alpha_x = self.field.derivative(x, 1);
        let [big_m, m, _, _] = self.m0_jet(x).0;
        (-alpha * t).exp() * (m - alpha_x * t * big_m)
    }

    /// Trapezoid value of `int v_hat(0, x) dx`; the exact value is `-(u+ - u-) / alpha_bar`.
    pub fn mass_check(&self, grid: &Grid1D) -> Result<f64> {
        self.check_support(grid)?;
        let v_hat: Vec<f64> = grid
            .centers()
            .into_iter()
            .map(|x| self.derivs(0.0, x).v_hat[0])
            .collect();
        Ok(trapezoid(&v_hat, grid.dx()))
    }

    /// Truncation error when the mollifier or the damping bumps reach the grid edge.
    pub fn check_support(&self, grid: &Grid1D) -> Result<()> {
        let l = grid.half_length();
        let lo = self.mollifier.center - self.mollifier.width;
        let hi = self.mollifier.center + self.mollifier.width;
        if lo <= -l || hi >= l {
            return Err(Error::Truncation {
                what: "mollifier support".into(),
                magnitude: self.mollifier.density(self.mollifier.center),
            });
        }
        let edge = self.field.boundary_magnitude(l);
        if edge >= SUPPORT_TOLERANCE {
            return Err(Error::Truncation {
                what: "alpha - alpha_bar".into(),
                magnitude: edge,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Bump, DampingShape};

    fn bump_field(alpha_bar: f64, a: f64) -> DampingField {
        DampingField::new(alpha_bar, DampingShape::GaussianBump(Bump { a, w: 1.0, x_c: 0.5 })).unwrap()
    }

    #[test]
    fn mollifier_has_unit_mass_and_consistent_derivatives() {
        let m = Mollifier::new(1.3, 0.2).unwrap();
        let grid = Grid1D::new(3.0, 60_000).unwrap();
        let dens = grid.sample(|x| m.density(x));
        assert!((trapezoid(&dens, grid.dx()) - 1.0).abs() < 1e-10);
        let h = 1e-5;
        for &x in &[-0.9, -0.3, 0.2, 0.75, 1.4] {
            let j = m.jet(x);
            let jp = m.jet(x + h);
            let jm = m.jet(x - h);
            for k in 0..3 {
                assert!(((jp[k] - jm[k]) / (2.0 * h) - j[k + 1]).abs() < 1e-7, "k={k} x={x}");
            }
        }
        assert_eq!(m.jet(-5.0), [0.0; 4]);
        assert_eq!(m.jet(5.0), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn reference_values() {
        let field = bump_field(1.0, 0.3);
        let corr = CorrectionFunction::new(Mollifier::default(), 0.4, -0.2, field);
        let (v, u) = corr.eval(0.0, -30.0).unwrap();
        assert_eq!((v, u), (0.0, 0.4));

        let flat = DampingField::constant(2.0).unwrap();
        let corr = CorrectionFunction::new(Mollifier::default(), 0.4, -0.2, flat);
        for &(t, x) in &[(0.0, 0.1), (1.5, -0.6), (3.0, 0.9)] {
            let (v, _) = corr.eval(t, x).unwrap();
            let expected = (-2.0 * t).exp() * (-0.6) * Mollifier::default().density(x) / (-2.0);
            assert!((v - expected).abs() < 1e-15);
        }

        let corr = CorrectionFunction::new(Mollifier::default(), 0.3, 0.3, flat);
        for &(t, x) in &[(0.0, 0.1), (2.0, -0.6)] {
            let (v, u) = corr.eval(t, x).unwrap();
            assert_eq!(v, 0.0);
            assert!((u - 0.3 * (-2.0 * t).exp()).abs() < 1e-16);
        }
        assert!(corr.eval(-1.0, 0.0).is_err());
    }

    #[test]
    fn jets_match_closed_forms() {
        let corr = CorrectionFunction::new(Mollifier::new(1.5, 0.3).unwrap(), -0.3, 0.5, bump_field(1.0, 0.4));
        for &(t, x) in &[(0.0, 0.0), (0.7, 0.5), (3.0, -1.0), (1.0, 2.5)] {
            let d = corr.derivs(t, x);
            let (v, u) = corr.eval(t, x).unwrap();
            assert!((d.v_hat[0] - v).abs() < 1e-14);
            assert!((d.u_hat[0] - u).abs() < 1e-14);
            assert!((d.u_hat[1] - corr.u_hat_x(t, x)).abs() < 1e-13);
            assert!((corr.v_hat_t(t, x) - corr.u_hat_x(t, x)).abs() < 1e-13);
        }
    }

    #[test]
    fn correction_mass() {
        let grid = Grid1D::new(20.0, 40_000).unwrap();
        let one = CorrectionFunction::new(Mollifier::default(), 0.0, 1.0, DampingField::constant(1.0).unwrap());
        assert!((one.mass_check(&grid).unwrap() + 1.0).abs() < 1e-8);
        let zero = CorrectionFunction::new(Mollifier::default(), 0.7, 0.7, bump_field(4.0, 1.0));
        assert!(zero.mass_check(&grid).unwrap().abs() < 1e-12);
        let two = CorrectionFunction::new(Mollifier::default(), -1.0, 1.0, bump_field(4.0, 1.0));
        assert!((two.mass_check(&grid).unwrap() + 0.5).abs() < 1e-8);

        let tiny = Grid1D::new(0.8, 100).unwrap();
        assert!(matches!(one.mass_check(&tiny), Err(Error::Truncation { .. })));
    }
}
