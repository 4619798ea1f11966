//! Quadrature and finite differences on uniformly spaced samples.

/// Composite trapezoid rule over all samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            dx * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Running trapezoid integral starting at zero on the first sample.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out.truncate(values.len());
    out
}

/// Second-order centered first difference; second-order one-sided at the
/// two ends.
pub fn centered_difference(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let d = (values[1] - values[0]) / dx;
            out.fill(d);
        }
        return out;
    }
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dx);
    out
}

/// Second-order three-point derivative at `t1` from non-uniformly spaced
/// samples `(t0, f0), (t1, f1), (t2, f2)`.
pub fn three_point_derivative(t: [f64; 3], f: [f64; 3], at: usize) -> f64 {
    let [t0, t1, t2] = t;
    let [f0, f1, f2] = f;
    // derivative of the Lagrange interpolant through the three nodes
    let x = t[at];
    let l0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
    let l1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
    let l2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
    f0 * l0 + f1 * l1 + f2 * l2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_exact_on_linear() {
        let dx = 0.1;
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * dx + 1.0).collect();
        assert!((trapezoid(&v, dx) - 2.0).abs() < 1e-14);
        let c = cumulative_trapezoid(&v, dx);
        assert_eq!(c.len(), v.len());
        assert!((c[10] - trapezoid(&v, dx)).abs() < 1e-14);
    }

    #[test]
    fn differences_exact_on_quadratics() {
        let dx = 0.25;
        let v: Vec<f64> = (0..9).map(|i| (i as f64 * dx).powi(2)).collect();
        let d = centered_difference(&v, dx);
        for (i, di) in d.iter().enumerate() {
            assert!((di - 2.0 * i as f64 * dx).abs() < 1e-12);
        }
    }

    #[test]
    fn nonuniform_three_point() {
        let t = [0.0, 0.3, 1.0];
        let f = t.map(|s: f64| 3.0 * s * s - s);
        for at in 0..3 {
            let exact = 6.0 * t[at] - 1.0;
            assert!((three_point_derivative(t, f, at) - exact).abs() < 1e-12);
        }
    }
}
