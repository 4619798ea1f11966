//! Truncated Taylor jets `[f, f', f'', f''']` for closed-form
//! differentiation of composite expressions in one variable.

use std::ops::{Add, Mul, Neg, Sub};

pub const JET_LEN: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; JET_LEN]);

const BINOM: [[f64; JET_LEN]; JET_LEN] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn d(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    /// Derivative jet; the highest coefficient is lost and set to NaN.
    pub fn derivative(self) -> Self {
        Jet([self.0[1], self.0[2], self.0[3], f64::NAN])
    }

    /// `h(g(x))` given the derivatives `[h, h', h'', h''']` of the outer
    /// function evaluated at `g(x)` (Faa di Bruno to third order).
    pub fn compose(self, outer: [f64; JET_LEN]) -> Self {
        let [_, g1, g2, g3] = self.0;
        let [h0, h1, h2, h3] = outer;
        Jet([
            h0,
            h1 * g1,
            h2 * g1 * g1 + h1 * g2,
            h3 * g1 * g1 * g1 + 3.0 * h2 * g1 * g2 + h1 * g3,
        ])
    }

    pub fn exp(self) -> Self {
        let e = self.0[0].exp();
        self.compose([e; JET_LEN])
    }

    pub fn recip(self) -> Self {
        let g = self.0[0];
        let r = 1.0 / g;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Jet(out)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [0.0; JET_LEN];
        for (k, o) in out.iter_mut().enumerate() {
            for j in 0..=k {
                *o += BINOM[k][j] * self.0[j] * rhs.0[k - j];
            }
        }
        Jet(out)
    }
}
