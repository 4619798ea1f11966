use crate::error::{Error, Result};
use crate::math::quad::centered_difference;
use crate::models::Grid1D;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
    H1,
    H2,
}

/// `dx * sum f^2`
#[inline]
pub fn sq_l2(values: &[f64], dx: f64) -> f64 {
    dx * values.iter().map(|v| v * v).sum::<f64>()
}

pub fn linf(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn discrete_norm(values: &[f64], grid: &Grid1D, kind: NormKind) -> Result<f64> {
    if values.len() != grid.n_cells() {
        return Err(Error::Argument(format!(
            "array of length {} does not match grid with {} cells",
            values.len(),
            grid.n_cells()
        )));
    }
    let dx = grid.dx();
    Ok(match kind {
        NormKind::L1 => dx * values.iter().map(|v| v.abs()).sum::<f64>(),
        NormKind::L2 => sq_l2(values, dx).sqrt(),
        NormKind::Linf => linf(values),
        NormKind::H1 | NormKind::H2 => {
            let d1 = centered_difference(values, dx);
            let mut total = sq_l2(values, dx) + sq_l2(&d1, dx);
            if kind == NormKind::H2 {
                total += sq_l2(&second_difference(values, dx, 1), dx);
            }
            total.sqrt()
        }
    })
}

/// `(f[i+s] - f[i-s]) / (2 s dx)`; zero where the stencil leaves the array.
pub fn first_difference(values: &[f64], dx: f64, s: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    let h = 2.0 * s as f64 * dx;
    for i in s..n.saturating_sub(s) {
        out[i] = (values[i + s] - values[i - s]) / h;
    }
    out
}

/// `(f[i+s] - 2 f[i] + f[i-s]) / (s dx)^2`; zero where the stencil leaves the array.
pub fn second_difference(values: &[f64], dx: f64, s: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    let h2 = (s as f64 * dx).powi(2);
    for i in s..n.saturating_sub(s) {
        out[i] = (values[i + s] - 2.0 * values[i] + values[i - s]) / h2;
    }
    out
}
