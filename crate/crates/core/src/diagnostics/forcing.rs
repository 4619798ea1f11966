use super::fit::fit_power_law;
use super::norms::sq_l2;
use crate::error::{Error, Result};
use crate::models::{Grid1D, PressureLaw};
use crate::profiles::{CorrectionFunction, DiffusionWave, FieldDerivs, SimilarityProfile};

/// Forcing terms on the grid: the parts, their sum, and closed-form derivatives of the sum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForcingFields {
    pub parts: Vec<Vec<f64>>,
    pub total: Vec<f64>,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub tx: Vec<f64>,
}

/// L2 norms of a forcing and its derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ForcingNorms {
    pub value: f64,
    pub x: f64,
    pub t: f64,
    pub tx: f64,
}

impl ForcingFields {
    pub fn norms(&self, dx: f64) -> ForcingNorms {
        ForcingNorms {
            value: sq_l2(&self.total, dx).sqrt(),
            x: sq_l2(&self.x, dx).sqrt(),
            t: sq_l2(&self.t, dx).sqrt(),
            tx: sq_l2(&self.tx, dx).sqrt(),
        }
    }
}

/// `[Y, Y_x, Y_xx, Y_t, Y_xt, Y_xxt]`
type Field6 = [f64; 6];

/// `[p(Y)_x, p(Y)_xx, p(Y)_xt, p(Y)_xxt]`
#[inline]
fn pressure_gradient(law: &PressureLaw, y: Field6) -> [f64; 4] {
    let [_, p1, p2, p3] = law.derivatives(y[0]);
    let [_, yx, yxx, yt, yxt, yxxt] = y;
    [
        p1 * yx,
        p2 * yx * yx + p1 * yxx,
        p2 * yt * yx + p1 * yxt,
        p3 * yx * yx * yt + 2.0 * p2 * yx * yxt + p2 * yt * yxx + p1 * yxxt,
    ]
}

/// `[value, x, t, tx]` of every part at one point.
fn point_forcing(
    law: &PressureLaw,
    corr: &CorrectionFunction,
    d: &FieldDerivs,
    t: f64,
    x: f64,
    linear_v_bar: Option<f64>,
) -> Vec<[f64; 4]> {
    let field = corr.field();
    let dev = field.alpha(x) - field.alpha_bar();
    let alpha_x = field.derivative(x, 1);
    let mut parts = Vec::with_capacity(4);

    parts.push([-d.u_t, -d.u_tx, -d.u_tt, -d.u_ttx]);
    parts.push([
        -dev * d.u,
        -alpha_x * d.u - dev * d.u_x,
        -dev * d.u_t,
        -alpha_x * d.u_t - dev * d.u_tx,
    ]);

    let v = [d.v, d.v_x, d.v_xx, d.v_t, d.v_xt, d.v_xxt];
    let sv = pressure_gradient(law, v);
    if let Some(v_bar) = linear_v_bar {
        let c = law.derivative(v_bar, 1);
        let lin = [c * d.v_x, c * d.v_xx, c * d.v_xt, c * d.v_xxt];
        parts.push([0, 1, 2, 3].map(|k| -(sv[k] - lin[k])));
    }

    let c = corr.derivs(t, x);
    let w = [
        d.v + c.v_hat[0],
        d.v_x + c.v_hat[1],
        d.v_xx + c.v_hat[2],
        d.v_t + c.u_hat[1],
        d.v_xt + c.u_hat[2],
        d.v_xxt + c.u_hat[3],
    ];
    let sw = pressure_gradient(law, w);
    parts.push([0, 1, 2, 3].map(|k| -(sw[k] - sv[k])));
    parts
}

fn assemble(grid: &Grid1D, mut at: impl FnMut(f64) -> Vec<[f64; 4]>) -> ForcingFields {
    let n = grid.n_cells();
    let mut out = ForcingFields {
        total: vec![0.0; n],
        x: vec![0.0; n],
        t: vec![0.0; n],
        tx: vec![0.0; n],
        ..ForcingFields::default()
    };
    for i in 0..n {
        let parts = at(grid.x(i));
        if out.parts.is_empty() {
            out.parts = vec![vec![0.0; n]; parts.len()];
        }
        for (k, p) in parts.iter().enumerate() {
            out.parts[k][i] = p[0];
            out.total[i] += p[0];
            out.x[i] += p[1];
            out.t[i] += p[2];
            out.tx[i] += p[3];
        }
    }
    out
}

/// `F = F1 + F2 + F3 + F4` with `F1 = -U_t`, `F2 = -(alpha - alpha_bar) U`,
/// `F3 = -(p(V) - p'(v_bar) V)_x`, `F4 = -(p(V + v_hat) - p(V))_x`.
pub fn forcing_f(
    t: f64,
    grid: &Grid1D,
    wave: &DiffusionWave,
    corr: &CorrectionFunction,
    law: &PressureLaw,
) -> Result<ForcingFields> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    Ok(assemble(grid, |x| {
        point_forcing(law, corr, &wave.field_derivs(t, x), t, x, Some(wave.v_bar))
    }))
}

/// `G = G1 + G2 + G3` with `G1 = -U_t`, `G2 = -(alpha - alpha_bar) U`,
/// `G3 = -(p(V + v_hat) - p(V))_x`.
pub fn forcing_g(
    t: f64,
    grid: &Grid1D,
    profile: &SimilarityProfile,
    corr: &CorrectionFunction,
    law: &PressureLaw,
) -> Result<ForcingFields> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    Ok(assemble(grid, |x| point_forcing(law, corr, &profile.field_derivs(t, x), t, x, None)))
}

/// Fitted slope of one squared forcing norm against its bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingCheck {
    pub name: String,
    pub slope: f64,
    pub r2: f64,
    pub bound: f64,
    pub pass: bool,
}

pub const FORCING_SLOPE_TOLERANCE: f64 = 0.2;

/// Exponent bounds for `||F||^2, ||F_x||^2, ||F_t||^2, ||F_tx||^2`.
pub const F_BOUNDS: [(&str, f64); 4] = [("F", -2.5), ("F_x", -3.0), ("F_t", -4.5), ("F_tx", -5.0)];
/// Exponent bounds for `||G||^2, ||G_t||^2, ||G_tx||^2`.
pub const G_BOUNDS: [(&str, f64); 3] = [("G", -1.0), ("G_t", -3.0), ("G_tx", -3.0)];

/// Log-log slopes of the squared norms in `samples`; `similarity` selects the G bounds.
pub fn forcing_decay_check(samples: &[(f64, ForcingNorms)], similarity: bool) -> Result<Vec<ForcingCheck>> {
    if samples.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "forcing check needs at least 10 samples, got {}",
            samples.len()
        )));
    }
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    if !((1.0 + hi) / (1.0 + lo) >= 100.0) {
        return Err(Error::InsufficientData(format!(
            "forcing samples span [{lo}, {hi}], less than two decades"
        )));
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let pick = |name: &str| -> Vec<f64> {
        samples
            .iter()
            .map(|(_, n)| match name {
                "F" | "G" => n.value,
                "F_x" => n.x,
                "F_t" | "G_t" => n.t,
                _ => n.tx,
            })
            .map(|v| v * v)
            .collect()
    };
    let bounds: Vec<(&str, f64)> = if similarity { G_BOUNDS.to_vec() } else { F_BOUNDS.to_vec() };
    bounds
        .into_iter()
        .map(|(name, bound)| {
            let (slope, _, r2) = fit_power_law(&ts, &pick(name))?;
            Ok(ForcingCheck {
                name: format!("||{name}||^2"),
                slope,
                r2,
                bound,
                pass: slope <= bound + FORCING_SLOPE_TOLERANCE,
            })
        })
        .collect()
}

/// `count` log-spaced times in `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}
