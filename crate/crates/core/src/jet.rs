//! Fourth-order jets: a value together with its first four derivatives at a
//! point. All closed-form derivatives in the crate are assembled from the
//! handful of primitives here (powers, reciprocals, products, composition).

use std::ops::{Add, Mul, Neg, Sub};

/// `[f, f', f'', f''', f'''']` at a fixed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Jet(pub [f64; 5]);

const BINOM4: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

impl Jet {
    /// The identity map evaluated at `p`.
    pub fn variable(p: f64) -> Self {
        Jet([p, 1.0, 0.0, 0.0, 0.0])
    }

    /// `alpha * p + beta`.
    pub fn linear(p: f64, alpha: f64, beta: f64) -> Self {
        Jet([alpha * p + beta, alpha, 0.0, 0.0, 0.0])
    }

    /// Derivatives of `p^alpha`, using falling factorials of `alpha`.
    /// Integer exponents produce exact zeros past their degree.
    pub fn power(p: f64, alpha: f64) -> Self {
        let mut out = [0.0; 5];
        let mut coeff = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = if coeff == 0.0 {
                0.0
            } else {
                coeff * p.powf(alpha - k as f64)
            };
            coeff *= alpha - k as f64;
        }
        Jet(out)
    }

    /// Derivatives of `(1 - p)^beta`.
    pub fn reflected_power(p: f64, beta: f64) -> Self {
        let mut jet = Jet::power(1.0 - p, beta);
        jet.0[1] = -jet.0[1];
        jet.0[3] = -jet.0[3];
        jet
    }

    /// Derivatives of `1 / (alpha * p + beta)`.
    pub fn reciprocal_linear(p: f64, alpha: f64, beta: f64) -> Self {
        let d = alpha * p + beta;
        let inv = 1.0 / d;
        let mut out = [0.0; 5];
        // (d^-1)^(k) = (-1)^k k! alpha^k d^-(k+1)
        let mut coeff = 1.0;
        let mut inv_pow = inv;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = coeff * inv_pow;
            coeff *= -((k + 1) as f64) * alpha;
            inv_pow *= inv;
        }
        Jet(out)
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|v| v * s))
    }

    /// Chain rule through `outer(inner(p))`, where `outer_at_inner` is the
    /// jet of the outer function evaluated at `inner.0[0]`.
    pub fn compose(outer_at_inner: Jet, inner: Jet) -> Self {
        let [_, g1, g2, g3, g4] = inner.0;
        let [f0, f1, f2, f3, f4] = outer_at_inner.0;
        Jet([
            f0,
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1.powi(3) + 3.0 * f2 * g1 * g2 + f1 * g3,
            f4 * g1.powi(4)
                + 6.0 * f3 * g1 * g1 * g2
                + f2 * (3.0 * g2 * g2 + 4.0 * g1 * g3)
                + f1 * g4,
        ])
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
        Jet(self.0.map(|v| -v))
    }
}

/// Leibniz product rule.
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [0.0; 5];
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = (0..=n)
                .map(|k| BINOM4[n][k] * self.0[k] * rhs.0[n - k])
                .sum();
        }
        Jet(out)
    }
}
