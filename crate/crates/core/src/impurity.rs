//! Impurity and preimpurity functions on `[0, 1]`.
//!
//! A preimpurity function is continuous on `[0, 1]`, smooth inside, and
//! strictly concave (`f'' < 0` on `(0, 1)`). Adding the condition
//! `f(0) = f(1) = 0` makes it an impurity function. Every function here
//! carries closed-form derivatives up to order four, including the ones
//! built by affine normalization and class-weight transforms, so criteria
//! depending on `f'''` and `f''''` never need numerical differencing.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::weighting;

/// Distance from the endpoints at which derivative grids start and stop.
pub const DELTA: f64 = 1e-6;

/// Default number of grid points for axiom and criterion checks.
pub const DEFAULT_GRID: usize = 2001;

/// `n` uniform points on `[DELTA, 1 - DELTA]`.
pub fn interior_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    let span = 1.0 - 2.0 * DELTA;
    (0..n)
        .map(|i| DELTA + span * i as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Entropy,
    Gini,
    /// `p - p^alpha`, `alpha > 1`
    PowerMinus(f64),
    /// `p^alpha - p`, `0 < alpha < 1`
    PowerPlus(f64),
    /// `p(1-p) / ((1-2m)p + m^2)`, `0 < m < 1`
    Mzr(f64),
    KmSqrt,
    /// `p^alpha (1-p)^(1-alpha)`, `0 < alpha < 1`
    CostInsensitive(f64),
    SymQuartic,
    QuarticDegenerate,
    /// Ascending coefficients.
    Polynomial(Vec<f64>),
    /// `scale * f(p) + slope * p + offset`
    Affine {
        scale: f64,
        slope: f64,
        offset: f64,
        inner: ImpurityFn,
    },
    /// `(1 + (w-1)p) f(phi_w(p))`
    Weighted { w: f64, inner: ImpurityFn },
}

/// A real function on `[0, 1]` with analytic derivatives up to order four.
///
/// Cheap to clone and immutable; safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpurityFn {
    repr: Arc<Repr>,
}

/// A catalog family: its name, parameter names and accepted ranges.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub params: &'static str,
    /// Parameters used when the family is listed without explicit values.
    #[serde(skip)]
    pub example: &'static [f64],
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "entropy",
        formula: "-p ln p - (1-p) ln(1-p)",
        params: "",
        example: &[],
    },
    CatalogEntry {
        name: "gini",
        formula: "2p(1-p)",
        params: "",
        example: &[],
    },
    CatalogEntry {
        name: "power-minus",
        formula: "p - p^alpha",
        params: "alpha > 1",
        example: &[3.0],
    },
    CatalogEntry {
        name: "power-plus",
        formula: "p^alpha - p",
        params: "0 < alpha < 1",
        example: &[0.5],
    },
    CatalogEntry {
        name: "mzr",
        formula: "p(1-p) / ((1-2m)p + m^2)",
        params: "0 < m < 1",
        example: &[0.3],
    },
    CatalogEntry {
        name: "km-sqrt",
        formula: "sqrt(p(1-p))",
        params: "",
        example: &[],
    },
    CatalogEntry {
        name: "cost-insensitive",
        formula: "p^alpha (1-p)^(1-alpha)",
        params: "0 < alpha < 1",
        example: &[0.3],
    },
    CatalogEntry {
        name: "sym-quartic",
        formula: "1 - 3(p-1/2)^2 - 4(p-1/2)^4",
        params: "",
        example: &[],
    },
    CatalogEntry {
        name: "quartic-degenerate",
        formula: "p^4 (1-p)^4",
        params: "",
        example: &[],
    },
    CatalogEntry {
        name: "polynomial",
        formula: "c0 + c1 p + c2 p^2 + ...",
        params: "ascending coefficients, at least one",
        example: &[0.0, 1.0, 0.0, -1.0],
    },
];

fn param_error(name: &str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        detail: detail.into(),
    }
}

fn expect_count(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(param_error(
            name,
            format!("expected {n} parameter(s), got {}", params.len()),
        ));
    }
    if params.iter().any(|v| !v.is_finite()) {
        return Err(param_error(name, "parameters must be finite"));
    }
    Ok(())
}

fn open_unit(name: &str, what: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(param_error(name, format!("{what} must lie in (0, 1), got {v}")))
    }
}

impl ImpurityFn {
    fn from_repr(repr: Repr) -> Self {
        ImpurityFn {
            repr: Arc::new(repr),
        }
    }

    /// Looks up a catalog family by name and validates its parameters.
    pub fn catalog(name: &str, params: &[f64]) -> Result<Self> {
        let repr = match name {
            "entropy" => {
                expect_count(name, params, 0)?;
                Repr::Entropy
            }
            "gini" => {
                expect_count(name, params, 0)?;
                Repr::Gini
            }
            "power-minus" => {
                expect_count(name, params, 1)?;
                if params[0] <= 1.0 {
                    return Err(param_error(name, format!("alpha must exceed 1, got {}", params[0])));
                }
                Repr::PowerMinus(params[0])
            }
            "power-plus" => {
                expect_count(name, params, 1)?;
                Repr::PowerPlus(open_unit(name, "alpha", params[0])?)
            }
            "mzr" => {
                expect_count(name, params, 1)?;
                Repr::Mzr(open_unit(name, "m", params[0])?)
            }
            "km-sqrt" => {
                expect_count(name, params, 0)?;
                Repr::KmSqrt
            }
            "cost-insensitive" => {
                expect_count(name, params, 1)?;
                Repr::CostInsensitive(open_unit(name, "alpha", params[0])?)
            }
            "sym-quartic" => {
                expect_count(name, params, 0)?;
                Repr::SymQuartic
            }
            "quartic-degenerate" => {
                expect_count(name, params, 0)?;
                Repr::QuarticDegenerate
            }
            "polynomial" => return Self::polynomial(params.to_vec()),
            "tw" => {
                return Err(param_error(name, "use the `tw:<w>:<spec>` form"));
            }
            "affine" => {
                return Err(param_error(name, "use the `affine:<A>,<B>,<C>:<spec>` form"));
            }
            other => return Err(Error::UnknownFunction(other.to_string())),
        };
        Ok(Self::from_repr(repr))
    }

    pub fn entropy() -> Self {
        Self::from_repr(Repr::Entropy)
    }

    pub fn gini() -> Self {
        Self::from_repr(Repr::Gini)
    }

    /// `p - p^alpha`; `power_minus(3.0)` is the running `p - p^3` example.
    pub fn power_minus(alpha: f64) -> Result<Self> {
        Self::catalog("power-minus", &[alpha])
    }

    pub fn power_plus(alpha: f64) -> Result<Self> {
        Self::catalog("power-plus", &[alpha])
    }

    pub fn mzr(m: f64) -> Result<Self> {
        Self::catalog("mzr", &[m])
    }

    pub fn km_sqrt() -> Self {
        Self::from_repr(Repr::KmSqrt)
    }

    pub fn cost_insensitive(alpha: f64) -> Result<Self> {
        Self::catalog("cost-insensitive", &[alpha])
    }

    pub fn sym_quartic() -> Self {
        Self::from_repr(Repr::SymQuartic)
    }

    pub fn quartic_degenerate() -> Self {
        Self::from_repr(Repr::QuarticDegenerate)
    }

    /// A polynomial in ascending coefficient order: `[c0, c1, c2, ...]`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(param_error("polynomial", "at least one coefficient is required"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(param_error("polynomial", "coefficients must be finite"));
        }
        Ok(Self::from_repr(Repr::Polynomial(coeffs)))
    }

    /// `scale * self + slope * p + offset`; `scale` must be positive.
    pub fn affine(&self, norm: AffineNormalization) -> Result<Self> {
        norm.validate()?;
        Ok(Self::from_repr(Repr::Affine {
            scale: norm.scale,
            slope: norm.slope,
            offset: norm.offset,
            inner: self.clone(),
        }))
    }

    pub(crate) fn weighted(&self, w: f64) -> Self {
        Self::from_repr(Repr::Weighted {
            w,
            inner: self.clone(),
        })
    }

    /// Family name: a catalog name, `tw`, or `affine`.
    pub fn name(&self) -> &'static str {
        match &*self.repr {
            Repr::Entropy => "entropy",
            Repr::Gini => "gini",
            Repr::PowerMinus(_) => "power-minus",
            Repr::PowerPlus(_) => "power-plus",
            Repr::Mzr(_) => "mzr",
            Repr::KmSqrt => "km-sqrt",
            Repr::CostInsensitive(_) => "cost-insensitive",
            Repr::SymQuartic => "sym-quartic",
            Repr::QuarticDegenerate => "quartic-degenerate",
            Repr::Polynomial(_) => "polynomial",
            Repr::Affine { .. } => "affine",
            Repr::Weighted { .. } => "tw",
        }
    }

    /// The function's own parameters (not those of any wrapped function).
    pub fn params(&self) -> Vec<f64> {
        match &*self.repr {
            Repr::PowerMinus(a) | Repr::PowerPlus(a) | Repr::CostInsensitive(a) => vec![*a],
            Repr::Mzr(m) => vec![*m],
            Repr::Polynomial(c) => c.clone(),
            Repr::Affine {
                scale,
                slope,
                offset,
                ..
            } => vec![*scale, *slope, *offset],
            Repr::Weighted { w, .. } => vec![*w],
            _ => Vec::new(),
        }
    }

    /// The function wrapped by a transform, if any.
    pub fn inner(&self) -> Option<&ImpurityFn> {
        match &*self.repr {
            Repr::Affine { inner, .. } | Repr::Weighted { inner, .. } => Some(inner),
            _ => None,
        }
    }

    /// Canonical spec string; parses back to an identical function.
    pub fn spec(&self) -> String {
        self.to_string()
    }

    /// `f(p)` for `p` in `[0, 1]`.
    pub fn value(&self, p: f64) -> f64 {
        match &*self.repr {
            Repr::Entropy => xlogx_neg(p) + xlogx_neg(1.0 - p),
            Repr::Gini => 2.0 * p * (1.0 - p),
            Repr::PowerMinus(a) => p - p.powf(*a),
            Repr::PowerPlus(a) => p.powf(*a) - p,
            Repr::Mzr(m) => p * (1.0 - p) / ((1.0 - 2.0 * m) * p + m * m),
            Repr::KmSqrt => (p * (1.0 - p)).sqrt(),
            Repr::CostInsensitive(a) => p.powf(*a) * (1.0 - p).powf(1.0 - a),
            Repr::SymQuartic => {
                let x = p - 0.5;
                1.0 - 3.0 * x * x - 4.0 * x.powi(4)
            }
            Repr::QuarticDegenerate => p.powi(4) * (1.0 - p).powi(4),
            Repr::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * p + ci),
            Repr::Affine {
                scale,
                slope,
                offset,
                inner,
            } => scale * inner.value(p) + slope * p + offset,
            Repr::Weighted { w, inner } => {
                (1.0 + (w - 1.0) * p) * inner.value(weighting::phi_raw(*w, p))
            }
        }
    }

    /// `k`-th derivative at an interior point, `k` in `0..=4`.
    ///
    /// # Panics
    /// If `k > 4`.
    pub fn deriv(&self, k: usize, p: f64) -> f64 {
        assert!(k <= 4, "derivatives are available up to order 4");
        if k == 0 {
            return self.value(p);
        }
        self.jet(p).0[k]
    }

    /// All of `f, f', f'', f''', f''''` at an interior point.
    pub fn derivatives(&self, p: f64) -> [f64; 5] {
        let mut out = self.jet(p).0;
        out[0] = self.value(p);
        out
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.value(0.0), self.value(1.0))
    }

    pub(crate) fn jet(&self, p: f64) -> Jet {
        match &*self.repr {
            Repr::Entropy => {
                let q = 1.0 - p;
                Jet([
                    xlogx_neg(p) + xlogx_neg(q),
                    q.ln() - p.ln(),
                    -1.0 / (p * q),
                    1.0 / (p * p) - 1.0 / (q * q),
                    -2.0 / p.powi(3) - 2.0 / q.powi(3),
                ])
            }
            Repr::Gini => Jet([2.0 * p * (1.0 - p), 2.0 - 4.0 * p, -4.0, 0.0, 0.0]),
            Repr::PowerMinus(a) => Jet::variable(p) - Jet::power(p, *a),
            Repr::PowerPlus(a) => Jet::power(p, *a) - Jet::variable(p),
            Repr::Mzr(m) => {
                let numer = Jet([p * (1.0 - p), 1.0 - 2.0 * p, -2.0, 0.0, 0.0]);
                numer * Jet::reciprocal_linear(p, 1.0 - 2.0 * m, m * m)
            }
            Repr::KmSqrt => Jet::power(p, 0.5) * Jet::reflected_power(p, 0.5),
            Repr::CostInsensitive(a) => Jet::power(p, *a) * Jet::reflected_power(p, 1.0 - a),
            Repr::SymQuartic => {
                let x = p - 0.5;
                Jet([
                    1.0 - 3.0 * x * x - 4.0 * x.powi(4),
                    -6.0 * x - 16.0 * x.powi(3),
                    -6.0 - 48.0 * x * x,
                    -96.0 * x,
                    -96.0,
                ])
            }
            Repr::QuarticDegenerate => Jet::power(p, 4.0) * Jet::reflected_power(p, 4.0),
            Repr::Polynomial(c) => polynomial_jet(c, p),
            Repr::Affine {
                scale,
                slope,
                offset,
                inner,
            } => inner.jet(p).scale(*scale) + Jet::linear(p, *slope, *offset),
            Repr::Weighted { w, inner } => {
                let phi = weighting::phi_jet(*w, p);
                let composed = Jet::compose(inner.jet(phi.0[0]), phi);
                Jet::linear(p, w - 1.0, 1.0) * composed
            }
        }
    }
}

fn xlogx_neg(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

fn polynomial_jet(coeffs: &[f64], p: f64) -> Jet {
    let mut out = [0.0; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        // sum_i i(i-1)...(i-k+1) c_i p^(i-k), evaluated by Horner on the
        // differentiated coefficient list
        let mut acc = 0.0;
        for i in (k..coeffs.len()).rev() {
            let falling: f64 = (0..k).map(|j| (i - j) as f64).product();
            acc = acc * p + falling * coeffs[i];
        }
        *slot = acc;
    }
    Jet(out)
}

fn fmt_params(f: &mut fmt::Formatter<'_>, params: &[f64]) -> fmt::Result {
    for (i, v) in params.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Renders the `name[:params]` spec grammar accepted by [`FromStr`].
impl fmt::Display for ImpurityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.repr {
            Repr::Weighted { w, inner } => write!(f, "tw:{w}:{inner}"),
            Repr::Affine {
                scale,
                slope,
                offset,
                inner,
            } => write!(f, "affine:{scale},{slope},{offset}:{inner}"),
            _ => {
                f.write_str(self.name())?;
                let params = self.params();
                if !params.is_empty() {
                    f.write_str(":")?;
                    fmt_params(f, &params)?;
                }
                Ok(())
            }
        }
    }
}

fn parse_list(spec: &str, list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|e| Error::MalformedSpec {
                spec: spec.to_string(),
                detail: format!("`{s}`: {e}"),
            })
        })
        .collect()
}

/// Parses `name`, `name:p1,p2,...`, `tw:<w>:<spec>` and
/// `affine:<A>,<B>,<C>:<spec>`.
impl FromStr for ImpurityFn {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let malformed = |detail: &str| Error::MalformedSpec {
            spec: spec.to_string(),
            detail: detail.to_string(),
        };
        let Some((name, rest)) = spec.split_once(':') else {
            return ImpurityFn::catalog(spec, &[]);
        };
        match name {
            "tw" => {
                let (w, inner) = rest
                    .split_once(':')
                    .ok_or_else(|| malformed("expected `tw:<w>:<spec>`"))?;
                let w = parse_list(spec, w)?;
                if w.len() != 1 {
                    return Err(malformed("tw takes exactly one weight"));
                }
                let inner: ImpurityFn = inner.parse()?;
                weighting::apply_tw(&inner, weighting::WeightFactor::new(w[0])?)
            }
            "affine" => {
                let (abc, inner) = rest
                    .split_once(':')
                    .ok_or_else(|| malformed("expected `affine:<A>,<B>,<C>:<spec>`"))?;
                let abc = parse_list(spec, abc)?;
                if abc.len() != 3 {
                    return Err(malformed("affine takes exactly three numbers"));
                }
                let inner: ImpurityFn = inner.parse()?;
                inner.affine(AffineNormalization::new(abc[0], abc[1], abc[2])?)
            }
            _ => {
                if rest.trim().is_empty() {
                    return Err(malformed("empty parameter list"));
                }
                ImpurityFn::catalog(name, &parse_list(spec, rest)?)
            }
        }
    }
}

/// `A f(p) + B p + C` with `A > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineNormalization {
    #[serde(rename = "A")]
    pub scale: f64,
    #[serde(rename = "B")]
    pub slope: f64,
    #[serde(rename = "C")]
    pub offset: f64,
}

impl AffineNormalization {
    pub fn new(scale: f64, slope: f64, offset: f64) -> Result<Self> {
        let n = AffineNormalization {
            scale,
            slope,
            offset,
        };
        n.validate()?;
        Ok(n)
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite())
            || !self.slope.is_finite()
            || !self.offset.is_finite()
        {
            return Err(param_error(
                "affine",
                format!(
                    "need A > 0 and finite B, C; got ({}, {}, {})",
                    self.scale, self.slope, self.offset
                ),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, value: f64, p: f64) -> f64 {
        self.scale * value + self.slope * p + self.offset
    }
}

/// Outcome of [`is_preimpurity`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub holds: bool,
    /// First grid point where `f''` fails the sign test.
    pub first_violation: Option<f64>,
    pub detail: Option<String>,
}

/// True iff `f'' < 0` at every point of the interior grid and `f` is finite
/// at both endpoints.
pub fn is_preimpurity(f: &ImpurityFn, grid: usize) -> AxiomCheck {
    let grid = grid.max(3);
    let (f0, f1) = f.endpoints();
    if !f0.is_finite() || !f1.is_finite() {
        return AxiomCheck {
            holds: false,
            first_violation: None,
            detail: Some(format!("endpoint values are not finite: f(0) = {f0}, f(1) = {f1}")),
        };
    }
    for p in interior_grid(grid) {
        let d2 = f.deriv(2, p);
        if !(d2 < 0.0) {
            return AxiomCheck {
                holds: false,
                first_violation: Some(p),
                detail: Some(format!("f''({p}) = {d2}")),
            };
        }
    }
    AxiomCheck {
        holds: true,
        first_violation: None,
        detail: None,
    }
}

/// Concavity (`f'' <= 0`) on the interior grid, which is the same as never
/// increasing total impurity by splitting.
pub fn is_proper(f: &ImpurityFn, grid: usize) -> bool {
    let (f0, f1) = f.endpoints();
    f0.is_finite()
        && f1.is_finite()
        && interior_grid(grid.max(3)).into_iter().all(|p| f.deriv(2, p) <= 0.0)
}

fn require_preimpurity(f: &ImpurityFn) -> Result<()> {
    let check = is_preimpurity(f, DEFAULT_GRID);
    if check.holds {
        return Ok(());
    }
    let p = check.first_violation.unwrap_or(f64::NAN);
    Err(Error::NotPreimpurity {
        name: f.spec(),
        p,
        value: if p.is_nan() { f64::NAN } else { f.deriv(2, p) },
    })
}

/// The unique (up to scaling) impurity function equivalent to `f`:
/// `f(p) + (f(0) - f(1)) p - f(0)`. Functions that already vanish at both
/// endpoints are returned unchanged.
pub fn standard_form(f: &ImpurityFn) -> Result<ImpurityFn> {
    require_preimpurity(f)?;
    let (f0, f1) = f.endpoints();
    if f0 == 0.0 && f1 == 0.0 {
        return Ok(f.clone());
    }
    if let Repr::Polynomial(c) = &*f.repr {
        let mut c = c.clone();
        if c.len() < 2 {
            c.resize(2, 0.0);
        }
        c[0] -= f0;
        c[1] += f0 - f1;
        return ImpurityFn::polynomial(c);
    }
    f.affine(AffineNormalization::new(1.0, f0 - f1, -f0)?)
}

/// Scale-free constancy test: `max - min <= tol * (1 + max |v|)`.
pub(crate) fn nearly_constant(values: &[f64], tol: f64) -> bool {
    let (lo, hi, mag) = values.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0f64),
        |(lo, hi, mag), &v| (lo.min(v), hi.max(v), mag.max(v.abs())),
    );
    values.iter().all(|v| v.is_finite()) && hi - lo <= tol * (1.0 + mag)
}

/// If `g = A f + B p + C` for some `A > 0`, recovers `(A, B, C)`, so that
/// `f.affine(norm)` reproduces `g`.
///
/// `A` comes from the ratio `g'' / f''` on the default interior grid; `B`
/// and `C` from the endpoint values; the result is then checked pointwise.
pub fn are_equivalent(f: &ImpurityFn, g: &ImpurityFn, tol: f64) -> Option<AffineNormalization> {
    let grid = interior_grid(DEFAULT_GRID);
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&p| g.deriv(2, p) / f.deriv(2, p))
        .collect();
    if !nearly_constant(&ratios, tol) {
        return None;
    }
    let scale = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if !(scale > 0.0) {
        return None;
    }
    let (f0, f1) = f.endpoints();
    let (g0, g1) = g.endpoints();
    let offset = g0 - scale * f0;
    let slope = g1 - scale * f1 - offset;
    let norm = AffineNormalization::new(scale, slope, offset).ok()?;

    let mut points = grid;
    points.push(0.0);
    points.push(1.0);
    let mag = points
        .iter()
        .map(|&p| g.value(p).abs())
        .fold(0.0f64, f64::max);
    let ok = points
        .iter()
        .all(|&p| (g.value(p) - norm.apply(f.value(p), p)).abs() <= tol * (1.0 + mag));
    ok.then_some(norm)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the argmax of a strictly concave `f` on
/// `[0, 1]`.
///
/// Resolution is limited to about `sqrt(machine epsilon)` relative, since
/// function values near a smooth maximum differ only at second order.
pub fn maximizer(f: &ImpurityFn, tol: f64) -> Result<f64> {
    require_preimpurity(f)?;
    let tol = tol.max(f64::EPSILON);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f.value(x1);
    let mut f2 = f.value(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f.value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f.value(x1);
        }
    }
    Ok(0.5 * (lo + hi))
}
