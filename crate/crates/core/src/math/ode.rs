//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 200_000,
        }
    }
}

/// How an integration over `[t0, t1]` ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome<const N: usize> {
    Reached([f64; N]),
    /// The stop predicate fired after an accepted step ending at `t`.
    Stopped { t: f64, y: [f64; N] },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: OdeOptions,
    stop: impl Fn(f64, &[f64; N]) -> bool,
) -> Result<Outcome<N>> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Outcome::Reached(y0));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = span.abs() / 16.0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(Outcome::Reached(y));
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = step * dir;

        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                *yi += hs * acc;
            }
            k[s] = f(t + C[s] * hs, &ys);
        }

        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut hi5 = 0.0;
            let mut hi4 = 0.0;
            for s in 0..7 {
                hi5 += B5[s] * k[s][i];
                hi4 += B4[s] * k[s][i];
            }
            y_new[i] = y[i] + hs * hi5;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((hs * (hi5 - hi4)).abs() / scale);
        }

        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            // FSAL: the seventh stage is the derivative at the new point
            k[0] = k[6];
            if stop(t, &y) {
                return Ok(Outcome::Stopped { t, y });
            }
            let growth = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * growth;
        } else {
            let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h = step * shrink;
        }
        if h < 1e-14 * span.abs() {
            return Err(Error::Solver(format!("step size underflow at t = {t}")));
        }
    }
    Err(Error::Solver(format!(
        "exceeded {} steps integrating from {t0} to {t1}",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_full_period() {
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            OdeOptions::default(),
            |_, _| false,
        )
        .unwrap();
        let Outcome::Reached(y) = out else { panic!() };
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_and_stop() {
        let out = integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], 0.0, OdeOptions::default(), |_, _| false).unwrap();
        let Outcome::Reached(y) = out else { panic!() };
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-12);

        let out = integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 10.0, OdeOptions::default(), |_, y| y[0] > 2.0).unwrap();
        match out {
            Outcome::Stopped { t, y } => {
                assert!(t < 10.0);
                assert!(y[0] > 2.0);
            }
            other => panic!("expected stop, got {other:?}"),
        }
    }
}
