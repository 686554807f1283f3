//! Node splits described by prevalences alone.
//!
//! A node with total weight `W` and positive prevalence `c` that splits into
//! children with prevalences `a <= c <= b` has child weights fixed by Class-1
//! conservation (`W c = W_l a + W_r b`), so a split is fully described by the
//! pair `(a, b)`. The degenerate pair `(c, c)` stands for "do not split" and
//! scores the node's own impurity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::impurity::ImpurityFn;

/// Relative band within which two split impurities count as tied.
pub const EPS_TIE: f64 = 1e-12;

/// Total weight and positive prevalence of a node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NodeSummary {
    pub weight: f64,
    pub prevalence: f64,
}

impl NodeSummary {
    pub fn new(weight: f64, prevalence: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidNode(format!("weight must be positive, got {weight}")));
        }
        if !(0.0..=1.0).contains(&prevalence) {
            return Err(Error::InvalidNode(format!(
                "prevalence must lie in [0, 1], got {prevalence}"
            )));
        }
        Ok(NodeSummary { weight, prevalence })
    }

    /// Unit-weight node.
    pub fn unit(prevalence: f64) -> Result<Self> {
        Self::new(1.0, prevalence)
    }

    /// `W f(c)`.
    pub fn impurity(&self, f: &ImpurityFn) -> f64 {
        self.weight * f.value(self.prevalence)
    }
}

/// Left and right positive prevalences of one candidate split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitPoint {
    pub a: f64,
    pub b: f64,
}

impl SplitPoint {
    pub fn new(a: f64, b: f64) -> Self {
        SplitPoint { a, b }
    }

    /// The no-op split `(c, c)`.
    pub fn degenerate(c: f64) -> Self {
        SplitPoint { a: c, b: c }
    }

    pub fn is_degenerate_for(&self, c: f64) -> bool {
        self.a == c && self.b == c
    }

    /// Membership in `([0, c) x (c, 1]) ∪ {(c, c)}`.
    pub fn validate(&self, c: f64) -> Result<()> {
        let ok = self.is_degenerate_for(c)
            || (0.0 <= self.a && self.a < c && c < self.b && self.b <= 1.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSplit {
                a: self.a,
                b: self.b,
                c,
            })
        }
    }

    /// Positive predictive value of the one-split classifier.
    pub fn ppv(&self) -> f64 {
        self.b
    }

    /// Negative predictive value of the one-split classifier.
    pub fn npv(&self) -> f64 {
        1.0 - self.a
    }
}

/// `(W_l, W_r)`; the degenerate split keeps the whole node on the left.
pub fn child_weights(node: &NodeSummary, s: &SplitPoint) -> Result<(f64, f64)> {
    let c = node.prevalence;
    s.validate(c)?;
    if s.is_degenerate_for(c) {
        return Ok((node.weight, 0.0));
    }
    let span = s.b - s.a;
    Ok((
        node.weight * (s.b - c) / span,
        node.weight * (c - s.a) / span,
    ))
}

/// `W ((b-c)/(b-a) f(a) + (c-a)/(b-a) f(b))`, or `W f(c)` at `(c, c)`.
pub fn split_impurity(f: &ImpurityFn, node: &NodeSummary, s: &SplitPoint) -> Result<f64> {
    let c = node.prevalence;
    s.validate(c)?;
    if s.is_degenerate_for(c) {
        return Ok(node.impurity(f));
    }
    let span = s.b - s.a;
    Ok(node.weight * ((s.b - c) / span * f.value(s.a) + (c - s.a) / span * f.value(s.b)))
}

/// Impurity of a partition given directly by its two children.
pub fn children_impurity(
    f: &ImpurityFn,
    (left_weight, a): (f64, f64),
    (right_weight, b): (f64, f64),
) -> f64 {
    left_weight * f.value(a) + right_weight * f.value(b)
}

/// Secondary ordering among (near-)tied optimal splits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Largest `b`, then smallest `a`.
    MaxRight,
    /// Smallest `a`, then largest `b`.
    MinLeft,
}

/// Index of the minimum of `values` with ties (within [`EPS_TIE`] relative)
/// resolved by `prefer(i, j)`, which returns true when `i` beats `j`. Ties
/// that survive `prefer` go to the lowest index.
pub fn select_min_by(values: &[f64], mut prefer: impl FnMut(usize, usize) -> bool) -> Option<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let band = min + EPS_TIE * min.abs();
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v <= band {
            best = match best {
                Some(j) if !prefer(i, j) => Some(j),
                _ => Some(i),
            };
        }
    }
    best
}

/// Impurity of each candidate in `splits`.
pub fn evaluate_splits(f: &ImpurityFn, node: &NodeSummary, splits: &[SplitPoint]) -> Result<Vec<f64>> {
    splits.iter().map(|s| split_impurity(f, node, s)).collect()
}

/// Index of the optimal split under the given tie order.
pub fn optimal_index(
    f: &ImpurityFn,
    node: &NodeSummary,
    splits: &[SplitPoint],
    tie: TieBreak,
) -> Result<usize> {
    if splits.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let values = evaluate_splits(f, node, splits)?;
    select_min_by(&values, |i, j| {
        let (si, sj) = (&splits[i], &splits[j]);
        match tie {
            TieBreak::MaxRight => si.b > sj.b || (si.b == sj.b && si.a < sj.a),
            TieBreak::MinLeft => si.a < sj.a || (si.a == sj.a && si.b > sj.b),
        }
    })
    .ok_or_else(|| Error::Precondition("split impurities are not finite".into()))
}

/// The split minimizing impurity; ties prefer the larger right prevalence,
/// then the smaller left prevalence.
pub fn optimal_split(f: &ImpurityFn, node: &NodeSummary, splits: &[SplitPoint]) -> Result<SplitPoint> {
    Ok(splits[optimal_index(f, node, splits, TieBreak::MaxRight)?])
}

/// Weighted confusion matrix of the classifier "left child negative, right
/// child positive".
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub fp: f64,
    pub tn: f64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> f64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn ppv(&self) -> f64 {
        self.tp / (self.tp + self.fp)
    }

    pub fn npv(&self) -> f64 {
        self.tn / (self.tn + self.fn_)
    }
}

fn require_proper_split(node: &NodeSummary, s: &SplitPoint) -> Result<()> {
    s.validate(node.prevalence)?;
    if s.is_degenerate_for(node.prevalence) {
        return Err(Error::DegenerateSplit { a: s.a, b: s.b });
    }
    Ok(())
}

pub fn confusion(node: &NodeSummary, s: &SplitPoint) -> Result<ConfusionMatrix> {
    require_proper_split(node, s)?;
    let (a, b, c) = (s.a, s.b, node.prevalence);
    let k = node.weight / (b - a);
    Ok(ConfusionMatrix {
        tp: k * (c - a) * b,
        fn_: k * (b - c) * a,
        fp: k * (c - a) * (1.0 - b),
        tn: k * (b - c) * (1.0 - a),
    })
}

/// `W f(c)` minus the split impurity.
pub fn impurity_reduction(f: &ImpurityFn, node: &NodeSummary, s: &SplitPoint) -> Result<f64> {
    require_proper_split(node, s)?;
    Ok(node.impurity(f) - split_impurity(f, node, s)?)
}

/// Both sides of the integral identity for the unit-weight reduction:
///
/// ```text
/// f(c) - split = (b-c)/(b-a) ∫_a^c -f''(t)(t-a) dt + (c-a)/(b-a) ∫_c^b -f''(t)(b-t) dt
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReductionCheck {
    pub direct: f64,
    pub quadrature: f64,
    pub discrepancy: f64,
}

pub fn reduction_quadrature_check(f: &ImpurityFn, c: f64, s: &SplitPoint, tol: f64) -> Result<ReductionCheck> {
    let node = NodeSummary::unit(c)?;
    let direct = impurity_reduction(f, &node, s)?;
    let (a, b) = (s.a, s.b);
    let left = adaptive_simpson(&|t| -f.deriv(2, t) * (t - a), a, c, tol);
    let right = adaptive_simpson(&|t| -f.deriv(2, t) * (b - t), c, b, tol);
    let quadrature = (b - c) / (b - a) * left + (c - a) / (b - a) * right;
    Ok(ReductionCheck {
        direct,
        quadrature,
        discrepancy: (direct - quadrature).abs(),
    })
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}
