/// Physicists' Hermite polynomial `H_n(z)` by the three-term recurrence.
pub fn hermite(n: usize, z: f64) -> f64 {
    let mut h_prev = 1.0;
    if n == 0 {
        return h_prev;
    }
    let mut h = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// `d^n/dz^n exp(-z^2) = (-1)^n H_n(z) exp(-z^2)`.
pub fn gaussian_derivative(n: usize, z: f64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * hermite(n, z) * (-z * z).exp()
}

/// `d^k/dz^k exp(-z^2)` for `k = 0..N`.
pub fn gaussian_derivatives<const N: usize>(z: f64) -> [f64; N] {
    let e = (-z * z).exp();
    let mut out = [0.0; N];
    let (mut h_prev, mut h) = (0.0, 1.0);
    for (k, o) in out.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *o = sign * h * e;
        let next = 2.0 * z * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    out
}
