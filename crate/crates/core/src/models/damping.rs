use crate::error::{Error, Result};
use crate::math::hermite::gaussian_derivative;
use crate::models::Grid1D;

/// Boundary magnitude below which a bump counts as fully resolved.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// One Gaussian bump `a * exp(-((x - x_c) / w)^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub a: f64,
    pub w: f64,
    pub x_c: f64,
}

impl Bump {
    #[inline]
    fn derivative(&self, x: f64, k: usize) -> f64 {
        let z = (x - self.x_c) / self.w;
        if z.abs() > 40.0 {
            return 0.0;
        }
        self.a * gaussian_derivative(k, z) / self.w.powi(k as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DampingShape {
    Constant,
    GaussianBump(Bump),
    DoubleBump([Bump; 2]),
}

impl DampingShape {
    pub fn bumps(&self) -> &[Bump] {
        match self {
            DampingShape::Constant => &[],
            DampingShape::GaussianBump(b) => std::slice::from_ref(b),
            DampingShape::DoubleBump(bs) => bs,
        }
    }
}

/// Space-dependent damping `alpha(x) = alpha_bar + sum of bumps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingField {
    alpha_bar: f64,
    shape: DampingShape,
    alpha_0: f64,
}

impl DampingField {
    pub fn new(alpha_bar: f64, shape: DampingShape) -> Result<Self> {
        if !(alpha_bar > 0.0 && alpha_bar.is_finite()) {
            return Err(Error::Domain(format!("alpha_bar must be positive, got {alpha_bar}")));
        }
        for b in shape.bumps() {
            if !(b.w > 0.0 && b.w.is_finite()) {
                return Err(Error::Domain(format!("bump width must be positive, got {}", b.w)));
            }
            if !(b.a.is_finite() && b.x_c.is_finite()) {
                return Err(Error::Domain("bump amplitude and centre must be finite".into()));
            }
        }
        let alpha_0 = alpha_bar - shape.bumps().iter().map(|b| b.a.abs()).sum::<f64>();
        if alpha_0 <= 0.0 {
            return Err(Error::Domain(format!(
                "damping lower bound alpha_0 = {alpha_0} is not positive"
            )));
        }
        Ok(Self {
            alpha_bar,
            shape,
            alpha_0,
        })
    }

    pub fn constant(alpha_bar: f64) -> Result<Self> {
        Self::new(alpha_bar, DampingShape::Constant)
    }

    pub fn alpha_bar(&self) -> f64 {
        self.alpha_bar
    }

    pub fn alpha_0(&self) -> f64 {
        self.alpha_0
    }

    pub fn shape(&self) -> &DampingShape {
        &self.shape
    }

    pub fn is_constant(&self) -> bool {
        self.shape.bumps().iter().all(|b| b.a == 0.0)
    }

    /// `alpha`, `alpha'` or `alpha''` at `x`.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64> {
        if order > 2 {
            return Err(Error::Argument(format!("damping derivative order {order} outside 0..=2")));
        }
        Ok(self.derivative(x, order as usize))
    }

    /// Unchecked `alpha^(k)(x)` for any `k`.
    #[inline]
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        let bumps: f64 = self.shape.bumps().iter().map(|b| b.derivative(x, k)).sum();
        if k == 0 {
            self.alpha_bar + bumps
        } else {
            bumps
        }
    }

    #[inline]
    pub fn alpha(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// `[alpha, alpha', alpha'', alpha''']` at `x`.
    pub fn jet(&self, x: f64) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.derivative(x, k))
    }

    /// Largest bump magnitude left at either end of `[-L, L]`.
    pub fn boundary_magnitude(&self, half_length: f64) -> f64 {
        self.shape
            .bumps()
            .iter()
            .flat_map(|b| [-half_length, half_length].map(|x| (b.derivative(x, 0)).abs()))
            .fold(0.0, f64::max)
    }

    /// Discrete integrability certificate for the decay hypotheses on `alpha`.
    pub fn integrability_report(&self, grid: &Grid1D) -> Result<IntegrabilityReport> {
        let edge = self.boundary_magnitude(grid.half_length());
        if edge >= SUPPORT_TOLERANCE {
            return Err(Error::Truncation {
                what: "alpha - alpha_bar".into(),
                magnitude: edge,
            });
        }
        let dx = grid.dx();
        let mut report = IntegrabilityReport::default();
        for i in 0..grid.n_cells() {
            let x = grid.x(i);
            let dev = self.derivative(x, 0) - self.alpha_bar;
            let slope = self.derivative(x, 1).abs() + self.derivative(x, 2).abs();
            report.l1 += dev.abs() * dx;
            report.l2 += dev * dev * dx;
            report.sqrt_x_weighted_l2 += x.abs() * dev * dev * dx;
            report.derivative_weighted_l2 += ((1.0 + x.abs()) * slope).powi(2) * dx;
        }
        report.l2 = report.l2.sqrt();
        report.sqrt_x_weighted_l2 = report.sqrt_x_weighted_l2.sqrt();
        report.derivative_weighted_l2 = report.derivative_weighted_l2.sqrt();
        Ok(report)
    }
}

/// `|alpha - alpha_bar|_1`, `||alpha - alpha_bar||`, `|| |x|^(1/2) (alpha - alpha_bar) ||`
/// and `|| (1 + |x|)(|alpha'| + |alpha''|) ||` on the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegrabilityReport {
    pub l1: f64,
    pub l2: f64,
    pub sqrt_x_weighted_l2: f64,
    pub derivative_weighted_l2: f64,
}

impl IntegrabilityReport {
    pub fn values(&self) -> [f64; 4] {
        [self.l1, self.l2, self.sqrt_x_weighted_l2, self.derivative_weighted_l2]
    }
}
