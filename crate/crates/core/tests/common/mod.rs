//! Oracles written independently of the library: closed forms typed in by
//! hand, plain finite differences, and a shared pool of test functions.
#![allow(dead_code)]

use impurity_core::{AffineNormalization, ImpurityFn};

pub fn gini(p: f64) -> f64 {
    2.0 * p * (1.0 - p)
}

pub fn cube(p: f64) -> f64 {
    p - p * p * p
}

pub fn quartic_degenerate(p: f64) -> f64 {
    (p * (1.0 - p)).powi(4)
}

/// `W ((b-c) f(a) + (c-a) f(b)) / (b-a)` straight from the definition.
pub fn split_value(f: impl Fn(f64) -> f64, weight: f64, c: f64, a: f64, b: f64) -> f64 {
    weight * ((b - c) * f(a) + (c - a) * f(b)) / (b - a)
}

/// `G` from hand-supplied `f''`, `f'''`, `f''''`.
pub fn g_from(d2: f64, d3: f64, d4: f64, p: f64) -> f64 {
    let h = d3 / d2;
    let hp = (d4 * d2 - d3 * d3) / (d2 * d2);
    p * (p - 1.0) * hp + (2.0 * p - 1.0) * h + 3.0
}

/// `G` of `1 - 3(p-1/2)^2 - 4(p-1/2)^4`.
pub fn sym_quartic_g(p: f64) -> f64 {
    let t = p - 0.5;
    g_from(-6.0 - 48.0 * t * t, -96.0 * t, -96.0, p)
}

/// Five-point central difference of `f` at `p` with step `h`.
pub fn fd(f: impl Fn(f64) -> f64, p: f64, h: f64) -> f64 {
    (f(p - 2.0 * h) - 8.0 * f(p - h) + 8.0 * f(p + h) - f(p + 2.0 * h)) / (12.0 * h)
}

pub fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * (1.0 + want.abs())
}

pub fn cube_fn() -> ImpurityFn {
    ImpurityFn::power_minus(3.0).unwrap()
}

/// Preimpurity functions covering every family, a transform, and an
/// affine wrapper.
pub fn pool() -> Vec<ImpurityFn> {
    vec![
        ImpurityFn::entropy(),
        ImpurityFn::gini(),
        ImpurityFn::power_minus(1.5).unwrap(),
        ImpurityFn::power_minus(3.0).unwrap(),
        ImpurityFn::power_plus(0.3).unwrap(),
        ImpurityFn::power_plus(0.5).unwrap(),
        ImpurityFn::mzr(0.2).unwrap(),
        ImpurityFn::mzr(0.7).unwrap(),
        ImpurityFn::km_sqrt(),
        ImpurityFn::cost_insensitive(0.2).unwrap(),
        ImpurityFn::cost_insensitive(0.8).unwrap(),
        ImpurityFn::sym_quartic(),
        ImpurityFn::polynomial(vec![1.0, 2.0, -5.0, 0.0, -1.0]).unwrap(),
        "tw:2.5:entropy".parse().unwrap(),
        ImpurityFn::gini()
            .affine(AffineNormalization::new(3.0, -1.0, 0.5).unwrap())
            .unwrap(),
    ]
}

/// Pairs whose second-derivative ratio is nondecreasing.
pub fn ordered_pairs() -> Vec<(ImpurityFn, ImpurityFn)> {
    vec![
        (cube_fn(), ImpurityFn::gini()),
        (
            ImpurityFn::cost_insensitive(0.7).unwrap(),
            ImpurityFn::cost_insensitive(0.3).unwrap(),
        ),
        (ImpurityFn::mzr(0.7).unwrap(), ImpurityFn::mzr(0.3).unwrap()),
        (ImpurityFn::power_plus(0.5).unwrap(), ImpurityFn::power_plus(0.3).unwrap()),
    ]
}
