//! Purity orderings between two preimpurity functions.
//!
//! `f` splits more positively purely than `g` when, for every node and every
//! candidate set, the optimum under `f` (largest `b` on ties) has a right
//! prevalence at least that of the optimum under `g`. This holds exactly
//! when `f''/g''` is nondecreasing on `(0, 1)`, which [`ratio_monotone`]
//! decides on a grid. The remaining operations corroborate the verdict:
//! randomized search for violations, explicit counterexamples when the
//! ratio decreases somewhere, and a dataset that realizes any pair of
//! prevalence splits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::impurity::{
    interior_grid, is_preimpurity, maximizer, nearly_constant, AffineNormalization, ImpurityFn, DEFAULT_GRID,
};
use crate::split::{evaluate_splits, optimal_index, NodeSummary, SplitPoint, TieBreak};

/// Default band for adjacent ratio comparisons.
pub const DEFAULT_RATIO_TOL: f64 = 1e-9;

/// Golden-section tolerance used by [`maximizer_order_check`].
pub const MAXIMIZER_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    FMorePositivelyPure,
    GMorePositivelyPure,
    Equivalent,
    Neither,
}

/// Summary of `r = f''/g''` over the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEvidence {
    pub grid: usize,
    pub tol: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_first: f64,
    pub ratio_last: f64,
    pub increasing_steps: usize,
    pub decreasing_steps: usize,
    pub flat_steps: usize,
    /// Left end of the first strictly decreasing step, if any.
    pub first_decrease_at: Option<f64>,
    pub first_increase_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    Ratio(RatioEvidence),
    Witness(Witness),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityVerdict {
    pub relation: Relation,
    pub evidence: Evidence,
}

impl PurityVerdict {
    pub fn ratio(&self) -> Option<&RatioEvidence> {
        match &self.evidence {
            Evidence::Ratio(r) => Some(r),
            Evidence::Witness(_) => None,
        }
    }
}

fn ratio_values(f: &ImpurityFn, g: &ImpurityFn, points: &[f64]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&p| {
            let gd = g.deriv(2, p);
            if gd == 0.0 || !gd.is_finite() {
                return Err(Error::SecondDerivativeVanishes { name: g.spec(), p });
            }
            let r = f.deriv(2, p) / gd;
            if r.is_finite() {
                Ok(r)
            } else {
                Err(Error::SecondDerivativeVanishes { name: f.spec(), p })
            }
        })
        .collect()
}

/// Classifies `r = f''/g''` as nondecreasing, nonincreasing, constant, or
/// neither. Adjacent steps smaller than `tol * (1 + max |r|)` count as flat.
pub fn ratio_monotone(f: &ImpurityFn, g: &ImpurityFn, grid: usize, tol: f64) -> Result<PurityVerdict> {
    let grid = grid.max(3);
    for h in [f, g] {
        let check = is_preimpurity(h, grid);
        if !check.holds {
            let p = check.first_violation.unwrap_or(f64::NAN);
            return Err(Error::NotPreimpurity {
                name: h.spec(),
                p,
                value: h.deriv(2, p),
            });
        }
    }
    let points = interior_grid(grid);
    let r = ratio_values(f, g, &points)?;
    let mag = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = tol * (1.0 + mag);

    let mut ev = RatioEvidence {
        grid,
        tol,
        ratio_min: r.iter().copied().fold(f64::INFINITY, f64::min),
        ratio_max: r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ratio_first: r[0],
        ratio_last: r[r.len() - 1],
        increasing_steps: 0,
        decreasing_steps: 0,
        flat_steps: 0,
        first_decrease_at: None,
        first_increase_at: None,
    };
    for (i, pair) in r.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if step > band {
            ev.increasing_steps += 1;
            ev.first_increase_at.get_or_insert(points[i]);
        } else if step < -band {
            ev.decreasing_steps += 1;
            ev.first_decrease_at.get_or_insert(points[i]);
        } else {
            ev.flat_steps += 1;
        }
    }
    let relation = if nearly_constant(&r, tol) {
        Relation::Equivalent
    } else {
        match (ev.increasing_steps > 0, ev.decreasing_steps > 0) {
            (_, false) => Relation::FMorePositivelyPure,
            (false, true) => Relation::GMorePositivelyPure,
            (true, true) => Relation::Neither,
        }
    };
    Ok(PurityVerdict {
        relation,
        evidence: Evidence::Ratio(ev),
    })
}

/// A two-candidate instance where the two functions pick different splits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub c: f64,
    pub splits: [SplitPoint; 2],
    pub chosen_by_f: SplitPoint,
    pub chosen_by_g: SplitPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub trials: u64,
    pub seed: u64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

/// One random instance: `c` uniform in `(0, 1)`, then two splits with `a`
/// uniform in `[0, c)` and `b` uniform in `(c, 1]`. The stream depends only
/// on `(seed, trial)`.
pub fn random_instance(seed: u64, trial: u64) -> (f64, [SplitPoint; 2]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    loop {
        let c: f64 = rng.random();
        if c <= 0.0 {
            continue;
        }
        let mut draw = || {
            let a = c * rng.random::<f64>();
            let b = c + (1.0 - c) * (1.0 - rng.random::<f64>());
            SplitPoint::new(a, b)
        };
        let s = [draw(), draw()];
        if s.iter().all(|s| s.validate(c).is_ok()) {
            return (c, s);
        }
    }
}

fn run_trials(
    f: &ImpurityFn,
    g: &ImpurityFn,
    trials: u64,
    seed: u64,
    tie: TieBreak,
    holds: impl Fn(&SplitPoint, &SplitPoint) -> bool + Sync,
) -> EmpiricalReport {
    let counterexample = (0..trials).into_par_iter().find_map_first(|trial| {
        let (c, splits) = random_instance(seed, trial);
        let node = NodeSummary::unit(c).ok()?;
        let fi = optimal_index(f, &node, &splits, tie).ok()?;
        let gi = optimal_index(g, &node, &splits, tie).ok()?;
        if holds(&splits[fi], &splits[gi]) {
            None
        } else {
            Some(Counterexample {
                trial,
                c,
                splits,
                chosen_by_f: splits[fi],
                chosen_by_g: splits[gi],
            })
        }
    });
    EmpiricalReport {
        trials,
        seed,
        passed: counterexample.is_none(),
        counterexample,
    }
}

/// Samples `trials` two-candidate instances and checks that `f`'s optimum
/// (largest `b` on ties) has `b` at least that of `g`'s.
pub fn empirical_purity_check(f: &ImpurityFn, g: &ImpurityFn, trials: u64, seed: u64) -> EmpiricalReport {
    run_trials(f, g, trials, seed, TieBreak::MaxRight, |sf, sg| sf.b >= sg.b)
}

/// The mirrored check: `f`'s optimum (smallest `a` on ties) has `a` at most
/// that of `g`'s, i.e. `f` splits more negatively purely than `g`.
pub fn empirical_negative_purity_check(f: &ImpurityFn, g: &ImpurityFn, trials: u64, seed: u64) -> EmpiricalReport {
    run_trials(f, g, trials, seed, TieBreak::MinLeft, |sf, sg| sf.a <= sg.a)
}

/// `f + B p + C` vanishing at `x0` and `x1`.
pub fn vanish_at(f: &ImpurityFn, x0: f64, x1: f64) -> Result<ImpurityFn> {
    let (y0, y1) = (f.value(x0), f.value(x1));
    let slope = -(y1 - y0) / (x1 - x0);
    let offset = -y0 - slope * x0;
    f.affine(AffineNormalization::new(1.0, slope, offset)?)
}

/// An instance on which `f` picks the split with the smaller right
/// prevalence while `g` picks the larger one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub c: f64,
    /// `[(a1, b1), (a2, b2)]` with `a1 < a2 < c < b1 < b2`.
    pub splits: [SplitPoint; 2],
    /// Grid interval on which `f''/g''` strictly decreases.
    pub interval: (f64, f64),
    pub f_impurities: [f64; 2],
    pub g_impurities: [f64; 2],
    pub chosen_by_f: SplitPoint,
    pub chosen_by_g: SplitPoint,
}

/// `(b2 h(a2) - a2 h(b2)) / (h(a2) - h(b2))` for `h` vanishing at `a1, b1`.
fn crossing_prevalence(h: &ImpurityFn, a2: f64, b2: f64) -> f64 {
    let (ha, hb) = (h.value(a2), h.value(b2));
    (b2 * ha - a2 * hb) / (ha - hb)
}

fn witness_in(f: &ImpurityFn, g: &ImpurityFn, lo: f64, hi: f64) -> Option<Witness> {
    let at = |t: f64| lo + t * (hi - lo);
    let (a1, a2, b1, b2) = (at(0.2), at(0.4), at(0.6), at(0.8));
    let fn_ = vanish_at(f, a1, b1).ok()?;
    let gn = vanish_at(g, a1, b1).ok()?;
    let c_g = crossing_prevalence(&gn, a2, b2);
    let c_f = crossing_prevalence(&fn_, a2, b2);
    if !(c_g < c_f) {
        return None;
    }
    let c = 0.5 * (c_g + c_f);
    let splits = [SplitPoint::new(a1, b1), SplitPoint::new(a2, b2)];
    let node = NodeSummary::unit(c).ok()?;
    let fi = optimal_index(f, &node, &splits, TieBreak::MaxRight).ok()?;
    let gi = optimal_index(g, &node, &splits, TieBreak::MaxRight).ok()?;
    if fi != 0 || gi != 1 {
        return None;
    }
    let fv = evaluate_splits(f, &node, &splits).ok()?;
    let gv = evaluate_splits(g, &node, &splits).ok()?;
    Some(Witness {
        c,
        splits,
        interval: (lo, hi),
        f_impurities: [fv[0], fv[1]],
        g_impurities: [gv[0], gv[1]],
        chosen_by_f: splits[fi],
        chosen_by_g: splits[gi],
    })
}

/// Builds a verified instance showing that `f` does not split more
/// positively purely than `g`, or returns `None` when `f''/g''` never
/// strictly decreases on the grid.
pub fn find_witness(f: &ImpurityFn, g: &ImpurityFn) -> Option<Witness> {
    find_witness_with(f, g, DEFAULT_GRID, DEFAULT_RATIO_TOL)
}

pub fn find_witness_with(f: &ImpurityFn, g: &ImpurityFn, grid: usize, tol: f64) -> Option<Witness> {
    let points = interior_grid(grid.max(3));
    let r = ratio_values(f, g, &points).ok()?;
    let mag = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = tol * (1.0 + mag);

    // maximal runs of strictly decreasing steps, as (start, end) indices
    let mut runs = Vec::new();
    let mut start = None;
    for i in 0..r.len() - 1 {
        let down = r[i] > r[i + 1] + band;
        match (down, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, r.len() - 1));
    }
    runs.sort_by_key(|&(s, e)| std::cmp::Reverse(e - s));
    runs.into_iter()
        .find_map(|(s, e)| witness_in(f, g, points[s], points[e]))
}

/// Eight weighted points, one of each class per quadrant, whose vertical
/// and horizontal half-planes realize two requested splits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizedDataset {
    pub c: f64,
    pub s1: SplitPoint,
    pub s2: SplitPoint,
    pub points: Vec<QuadrantPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadrantPoint {
    pub quadrant: u8,
    pub class: u8,
    pub weight: f64,
    pub x: f64,
    pub y: f64,
}

/// Prevalences measured on a realized dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfPlanePrevalences {
    pub total: f64,
    /// `x < 0` and `x > 0`: the first split.
    pub left: f64,
    pub right: f64,
    /// `y > 0` and `y < 0`: the second split.
    pub upper: f64,
    pub lower: f64,
}

impl RealizedDataset {
    pub fn prevalences(&self) -> HalfPlanePrevalences {
        let prev = |keep: &dyn Fn(&QuadrantPoint) -> bool| {
            let (pos, all) = self.points.iter().filter(|q| keep(q)).fold((0.0, 0.0), |(p, a), q| {
                (p + if q.class == 1 { q.weight } else { 0.0 }, a + q.weight)
            });
            pos / all
        };
        HalfPlanePrevalences {
            total: prev(&|_| true),
            left: prev(&|q| q.x < 0.0),
            right: prev(&|q| q.x > 0.0),
            upper: prev(&|q| q.y > 0.0),
            lower: prev(&|q| q.y < 0.0),
        }
    }

    /// Largest deviation of the measured prevalences from `(c, a1, b1, a2, b2)`.
    pub fn max_error(&self) -> f64 {
        let m = self.prevalences();
        [
            m.total - self.c,
            m.left - self.s1.a,
            m.right - self.s1.b,
            m.upper - self.s2.a,
            m.lower - self.s2.b,
        ]
        .iter()
        .fold(0.0f64, |acc, d| acc.max(d.abs()))
    }
}

const QUADRANT_XY: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];

/// Tolerance for the built-in verification of realized prevalences.
pub const REALIZE_TOL: f64 = 1e-10;

/// Weights for quadrants 1..4 as `(R_i, B_i)` (Class 1, Class 0).
fn quadrant_weights(c: f64, s1: &SplitPoint, s2: &SplitPoint) -> [(f64, f64); 4] {
    let d1 = s1.is_degenerate_for(c);
    let d2 = s2.is_degenerate_for(c);
    match (d1, d2) {
        (false, false) => {
            let (a1, b1, a2, b2) = (s1.a, s1.b, s2.a, s2.b);
            [
                (
                    b1 * a2 * (c - a1) * (b2 - c) * (1.0 - c),
                    (1.0 - b1) * (1.0 - a2) * (c - a1) * (b2 - c) * c,
                ),
                (
                    a1 * a2 * (b1 - c) * (b2 - c) * (1.0 - c),
                    (1.0 - a1) * (1.0 - a2) * (b1 - c) * (b2 - c) * c,
                ),
                (
                    a1 * b2 * (b1 - c) * (c - a2) * (1.0 - c),
                    (1.0 - a1) * (1.0 - b2) * (b1 - c) * (c - a2) * c,
                ),
                (
                    b1 * b2 * (c - a1) * (c - a2) * (1.0 - c),
                    (1.0 - b1) * (1.0 - b2) * (c - a1) * (c - a2) * c,
                ),
            ]
        }
        (false, true) => {
            let (a, b) = (s1.a, s1.b);
            let right = (b * (c - a), (1.0 - b) * (c - a));
            let left = (a * (b - c), (1.0 - a) * (b - c));
            [right, left, left, right]
        }
        (true, false) => {
            // the previous case reflected through y = -x, which carries the
            // vertical split onto the horizontal one
            let (a, b) = (s2.a, s2.b);
            let low = (b * (c - a), (1.0 - b) * (c - a));
            let high = (a * (b - c), (1.0 - a) * (b - c));
            [high, high, low, low]
        }
        (true, true) => [(c, 1.0 - c); 4],
    }
}

/// Builds the eight-point dataset realizing `s1` as the left/right
/// half-planes and `s2` as the upper/lower half-planes, then verifies it.
pub fn realize_splits(c: f64, s1: SplitPoint, s2: SplitPoint) -> Result<RealizedDataset> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Precondition(format!("prevalence must lie in (0, 1), got {c}")));
    }
    s1.validate(c)?;
    s2.validate(c)?;
    let weights = quadrant_weights(c, &s1, &s2);
    let mut points = Vec::with_capacity(8);
    for (i, ((r, b), (x, y))) in weights.iter().zip(QUADRANT_XY).enumerate() {
        let quadrant = i as u8 + 1;
        points.push(QuadrantPoint {
            quadrant,
            class: 1,
            weight: *r,
            x,
            y,
        });
        points.push(QuadrantPoint {
            quadrant,
            class: 0,
            weight: *b,
            x,
            y,
        });
    }
    let data = RealizedDataset { c, s1, s2, points };
    let err = data.max_error();
    if !(err <= REALIZE_TOL) {
        return Err(Error::Precondition(format!(
            "realized prevalences deviate by {err:e} from the request"
        )));
    }
    Ok(data)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaximizerCheck {
    pub f_maximizer: f64,
    pub g_maximizer: f64,
    pub holds: bool,
}

/// For impurity functions where `f` splits more positively purely than `g`,
/// checks that the maximizer of `f` is not left of the maximizer of `g`.
pub fn maximizer_order_check(f: &ImpurityFn, g: &ImpurityFn) -> Result<MaximizerCheck> {
    for h in [f, g] {
        let (h0, h1) = h.endpoints();
        if h0.abs() > 1e-12 || h1.abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "`{}` does not vanish at the endpoints; apply standard_form first",
                h.spec()
            )));
        }
    }
    let verdict = ratio_monotone(f, g, DEFAULT_GRID, DEFAULT_RATIO_TOL)?;
    if !matches!(verdict.relation, Relation::FMorePositivelyPure | Relation::Equivalent) {
        return Err(Error::Precondition(format!(
            "`{}` does not split more positively purely than `{}`",
            f.spec(),
            g.spec()
        )));
    }
    let mf = maximizer(f, 1e-12)?;
    let mg = maximizer(g, 1e-12)?;
    Ok(MaximizerCheck {
        f_maximizer: mf,
        g_maximizer: mg,
        holds: mf >= mg - MAXIMIZER_TOL,
    })
}
