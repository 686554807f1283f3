//! Class weighting as a transform of the impurity function.
//!
//! Scaling every Class-1 weight by `w` maps a node's positive prevalence `p`
//! to `phi_w(p) = wp / (1 + (w-1)p)`. Splitting the reweighted data with `f`
//! selects the same splits as splitting the raw data with
//! `T_w f(p) = (1 + (w-1)p) f(phi_w(p))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::impurity::{are_equivalent, interior_grid, ImpurityFn};
use crate::jet::Jet;

/// Absolute tolerance for sign and zero tests on `G`.
pub const DEFAULT_G_TOL: f64 = 1e-7;

/// Weights probed when cross-checking cost insensitivity by equivalence.
pub const INSENSITIVITY_WEIGHTS: [f64; 4] = [0.25, 0.5, 2.0, 4.0];

/// A positive class-1 weight multiplier.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct WeightFactor(f64);

impl WeightFactor {
    pub fn new(w: f64) -> Result<Self> {
        if w > 0.0 && w.is_finite() {
            Ok(WeightFactor(w))
        } else {
            Err(Error::InvalidWeight(w))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn inverse(self) -> Self {
        WeightFactor(1.0 / self.0)
    }
}

pub(crate) fn phi_raw(w: f64, p: f64) -> f64 {
    // endpoints are fixed points; keep them exact
    if p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        1.0
    } else {
        w * p / (1.0 + (w - 1.0) * p)
    }
}

/// Prevalence after scaling Class-1 weights by `w`.
pub fn phi(w: WeightFactor, p: f64) -> f64 {
    phi_raw(w.0, p)
}

/// `d phi_w / dp = w / (1 + (w-1)p)^2`.
pub fn phi_prime(w: WeightFactor, p: f64) -> f64 {
    phi_jet(w.0, p).0[1]
}

/// Derivatives of `phi_w` at `p`: `phi = w p / u`, `u = 1 + (w-1) p`,
/// `phi^(k) = (-1)^(k+1) k! w (w-1)^(k-1) / u^(k+1)`.
pub(crate) fn phi_jet(w: f64, p: f64) -> Jet {
    let d = w - 1.0;
    let inv = 1.0 / (1.0 + d * p);
    let inv2 = inv * inv;
    Jet([
        phi_raw(w, p),
        w * inv2,
        -2.0 * w * d * inv2 * inv,
        6.0 * w * d * d * inv2 * inv2,
        -24.0 * w * d * d * d * inv2 * inv2 * inv,
    ])
}

/// `T_w f`. Derivatives are carried through `phi_w` by the chain and product
/// rules, so `(T_w f)'' = w^2 / (1 + (w-1)p)^3 * f''(phi_w(p))` holds up to
/// rounding.
pub fn apply_tw(f: &ImpurityFn, w: WeightFactor) -> Result<ImpurityFn> {
    Ok(f.weighted(w.0))
}

/// `G` together with `H = f'''/f''` and `H'` on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GProfile {
    pub p: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub h_prime: Vec<f64>,
}

impl GProfile {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `(p, G(p))` at the smallest `G`.
    pub fn min(&self) -> (f64, f64) {
        self.p
            .iter()
            .zip(&self.g)
            .fold((f64::NAN, f64::INFINITY), |best, (&p, &g)| {
                if g < best.1 {
                    (p, g)
                } else {
                    best
                }
            })
    }

    pub fn max_abs(&self) -> f64 {
        self.g.iter().fold(0.0f64, |m, g| m.max(g.abs()))
    }
}

/// `G`, `H`, `H'` at a single interior point.
pub fn g_at(f: &ImpurityFn, p: f64) -> Result<(f64, f64, f64)> {
    let [_, _, d2, d3, d4] = f.derivatives(p);
    if !(d2 < 0.0) || !d2.is_finite() {
        return Err(Error::SecondDerivativeVanishes {
            name: f.spec(),
            p,
        });
    }
    let h = d3 / d2;
    let h_prime = (d4 * d2 - d3 * d3) / (d2 * d2);
    let g = p * (p - 1.0) * h_prime + (2.0 * p - 1.0) * h + 3.0;
    Ok((g, h, h_prime))
}

/// `G(p) = p(p-1) H'(p) + (2p-1) H(p) + 3` on `grid` interior points.
pub fn g_profile(f: &ImpurityFn, grid: usize) -> Result<GProfile> {
    let points = interior_grid(grid.max(2));
    let mut profile = GProfile {
        p: Vec::with_capacity(points.len()),
        g: Vec::with_capacity(points.len()),
        h: Vec::with_capacity(points.len()),
        h_prime: Vec::with_capacity(points.len()),
    };
    for p in points {
        let (g, h, hp) = g_at(f, p)?;
        profile.p.push(p);
        profile.g.push(g);
        profile.h.push(h);
        profile.h_prime.push(hp);
    }
    Ok(profile)
}

/// Verdict of [`respects_class_weighting`], with the grid minimum of `G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightingVerdict {
    pub respects: bool,
    pub min_p: f64,
    pub min_g: f64,
}

/// `f` respects class weighting iff `G >= 0`; tested as `min G >= -tol`.
pub fn respects_class_weighting(f: &ImpurityFn, grid: usize, tol: f64) -> Result<WeightingVerdict> {
    let profile = g_profile(f, grid)?;
    let (min_p, min_g) = profile.min();
    Ok(WeightingVerdict {
        respects: min_g >= -tol,
        min_p,
        min_g,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InsensitivityReport {
    /// `|G| <= tol` everywhere on the grid.
    pub g_vanishes: bool,
    pub max_abs_g: f64,
    /// `f` is equivalent to `T_w f` for every probed weight.
    pub equivalent_under_weighting: bool,
    /// Recovered scale `A` for each probed weight, absent when not equivalent.
    pub scales: Vec<(f64, Option<f64>)>,
}

impl InsensitivityReport {
    pub fn is_insensitive(&self) -> bool {
        self.g_vanishes && self.equivalent_under_weighting
    }
}

/// Cost insensitivity: `G` vanishes, cross-checked by `f ~ T_w f` for
/// `w` in [`INSENSITIVITY_WEIGHTS`].
pub fn cost_insensitivity(f: &ImpurityFn, grid: usize, tol: f64) -> Result<InsensitivityReport> {
    let profile = g_profile(f, grid)?;
    let max_abs_g = profile.max_abs();
    let mut scales = Vec::with_capacity(INSENSITIVITY_WEIGHTS.len());
    for w in INSENSITIVITY_WEIGHTS {
        let tw = apply_tw(f, WeightFactor(w))?;
        scales.push((w, are_equivalent(f, &tw, 1e-9).map(|n| n.scale)));
    }
    Ok(InsensitivityReport {
        g_vanishes: max_abs_g <= tol,
        max_abs_g,
        equivalent_under_weighting: scales.iter().all(|(_, a)| a.is_some()),
        scales,
    })
}

pub fn is_cost_insensitive(f: &ImpurityFn, grid: usize, tol: f64) -> Result<bool> {
    Ok(cost_insensitivity(f, grid, tol)?.is_insensitive())
}
