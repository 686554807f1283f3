//! Greedy binary classification trees on weighted planar data.
//!
//! Each internal node is an axis-aligned threshold. Candidates sit at
//! midpoints between consecutive distinct coordinates; the child with the
//! lower positive prevalence is always the left child.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impurity::{is_proper, ImpurityFn, DEFAULT_GRID};
use crate::split::{children_impurity, select_min_by, NodeSummary, SplitPoint, EPS_TIE};
use crate::weighting::{apply_tw, WeightFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn coord(self, p: &Point) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub label: u8,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedDataset {
    points: Vec<Point>,
}

impl WeightedDataset {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::InvalidDataset(format!("point {i} has non-finite coordinates")));
            }
            if p.label > 1 {
                return Err(Error::InvalidDataset(format!("point {i} has label {}", p.label)));
            }
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has non-positive weight {}",
                    p.weight
                )));
            }
        }
        Ok(WeightedDataset { points })
    }

    /// Unit-weight points on the x axis, one per label character (`'0'`/`'1'`).
    pub fn from_labels(labels: &str) -> Result<Self> {
        let points = labels
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '0' | '1' => Ok(Point {
                    x: (i + 1) as f64,
                    y: 0.0,
                    label: ch as u8 - b'0',
                    weight: 1.0,
                }),
                _ => Err(Error::InvalidDataset(format!("label `{ch}` is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same points with every Class-1 weight multiplied by `w`.
    pub fn reweighted(&self, w: WeightFactor) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| Point {
                weight: if p.label == 1 { p.weight * w.get() } else { p.weight },
                ..*p
            })
            .collect();
        WeightedDataset { points }
    }

    pub fn summary(&self) -> NodeSummary {
        let idx: Vec<usize> = (0..self.points.len()).collect();
        let (pos, neg) = class_weights(&self.points, &idx);
        NodeSummary {
            weight: pos + neg,
            prevalence: prevalence(pos, neg),
        }
    }

    /// Reads CSV with header `x,y,label,weight`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let points = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<Point>, _>>()
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Self::new(points)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InvalidDataset(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for p in &self.points {
            wtr.serialize(p).map_err(|e| Error::InvalidDataset(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::InvalidDataset(e.to_string()))
    }

    /// `n` points with coordinates on a 0.05 lattice in `[0, 1]^2` (so
    /// coordinates repeat), Class 1 with probability 0.4, and weights in
    /// `[0.5, 2)`. Always contains both classes when `n >= 2`.
    pub fn random(seed: u64, n: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<Point> = (0..n)
            .map(|_| Point {
                x: rng.random_range(0..=20) as f64 / 20.0,
                y: rng.random_range(0..=20) as f64 / 20.0,
                label: u8::from(rng.random_bool(0.4)),
                weight: rng.random_range(0.5..2.0),
            })
            .collect();
        if n >= 2 {
            points[0].label = 0;
            points[1].label = 1;
        }
        Self::new(points)
    }
}

fn class_weights(points: &[Point], idx: &[usize]) -> (f64, f64) {
    idx.iter().fold((0.0, 0.0), |(pos, neg), &i| {
        let p = &points[i];
        if p.label == 1 {
            (pos + p.weight, neg)
        } else {
            (pos, neg + p.weight)
        }
    })
}

fn prevalence(pos: f64, neg: f64) -> f64 {
    if pos == 0.0 {
        0.0
    } else if neg == 0.0 {
        1.0
    } else {
        pos / (pos + neg)
    }
}

/// One axis-aligned threshold and the prevalences it induces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub axis: Axis,
    pub threshold: f64,
    /// `(a, b)` with `a <= b`.
    pub split: SplitPoint,
    pub left_weight: f64,
    pub right_weight: f64,
    /// Whether the left (lower-prevalence) child is `coord < threshold`.
    pub left_is_below: bool,
}

fn candidates_for(points: &[Point], idx: &[usize], axes: &[Axis]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for &axis in Axis::BOTH.iter().filter(|a| axes.contains(a)) {
        let mut order = idx.to_vec();
        order.sort_by(|&i, &j| axis.coord(&points[i]).total_cmp(&axis.coord(&points[j])));
        let n = order.len();
        // prefix and suffix class sums, accumulated separately so a pure
        // side gets an exact 0 or 1 prevalence
        let mut below = vec![(0.0, 0.0); n + 1];
        let mut above = vec![(0.0, 0.0); n + 1];
        for k in 0..n {
            let p = &points[order[k]];
            let (pos, neg) = below[k];
            below[k + 1] = if p.label == 1 { (pos + p.weight, neg) } else { (pos, neg + p.weight) };
            let q = &points[order[n - 1 - k]];
            let (pos, neg) = above[n - k];
            above[n - 1 - k] = if q.label == 1 { (pos + q.weight, neg) } else { (pos, neg + q.weight) };
        }
        for k in 1..n {
            let lo = axis.coord(&points[order[k - 1]]);
            let hi = axis.coord(&points[order[k]]);
            if lo == hi {
                continue;
            }
            let (bp, bn) = below[k];
            let (ap, an) = above[k];
            let (pb, pa) = (prevalence(bp, bn), prevalence(ap, an));
            let (wb, wa) = (bp + bn, ap + an);
            let left_is_below = pb <= pa;
            let (a, b, wl, wr) = if left_is_below { (pb, pa, wb, wa) } else { (pa, pb, wa, wb) };
            out.push(Candidate {
                axis,
                threshold: 0.5 * (lo + hi),
                split: SplitPoint::new(a, b),
                left_weight: wl,
                right_weight: wr,
                left_is_below,
            });
        }
    }
    out
}

/// All threshold candidates over both axes, x first, thresholds ascending.
pub fn enumerate_candidates(data: &WeightedDataset) -> Vec<Candidate> {
    let idx: Vec<usize> = (0..data.len()).collect();
    candidates_for(&data.points, &idx, &Axis::BOTH)
}

/// `(a, b)` induced on `data` by the threshold `coord < threshold`.
pub fn threshold_prevalences(data: &WeightedDataset, axis: Axis, threshold: f64) -> Option<SplitPoint> {
    let (lo, hi): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| axis.coord(&data.points[i]) < threshold);
    if lo.is_empty() || hi.is_empty() {
        return None;
    }
    let (bp, bn) = class_weights(&data.points, &lo);
    let (ap, an) = class_weights(&data.points, &hi);
    let (pb, pa) = (prevalence(bp, bn), prevalence(ap, an));
    Some(SplitPoint::new(pb.min(pa), pb.max(pa)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowConfig {
    pub max_depth: usize,
    pub min_leaf_weight: f64,
    pub axes: Vec<Axis>,
    /// Grow with a non-concave `f` anyway.
    pub allow_improper: bool,
}

impl Default for GrowConfig {
    fn default() -> Self {
        GrowConfig {
            max_depth: 8,
            min_leaf_weight: 0.0,
            axes: Axis::BOTH.to_vec(),
            allow_improper: false,
        }
    }
}

impl GrowConfig {
    pub fn with_depth(max_depth: usize) -> Self {
        GrowConfig {
            max_depth,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeNode {
    #[serde(rename = "W")]
    pub weight: f64,
    pub c: f64,
    pub impurity: f64,
    pub depth: usize,
    /// Heavier class, ties going to Class 1.
    pub predicted: u8,
    #[serde(flatten)]
    pub split: Option<SplitInfo>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitInfo {
    pub axis: Axis,
    pub threshold: f64,
    /// Node impurity minus the children's total impurity.
    pub reduction: f64,
    pub ppv: f64,
    pub npv: f64,
    pub left_is_below: bool,
    pub left: Box<TreeNode>,
    pub right: Box<TreeNode>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tree {
    pub function: String,
    pub class1_weight: f64,
    pub root: TreeNode,
}

impl Tree {
    /// `(axis, threshold)` of every internal node in preorder.
    pub fn splits(&self) -> Vec<(Axis, f64)> {
        fn walk(n: &TreeNode, out: &mut Vec<(Axis, f64)>) {
            if let Some(s) = &n.split {
                out.push((s.axis, s.threshold));
                walk(&s.left, out);
                walk(&s.right, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn nodes(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        let mut stack = vec![&self.root];
        while let Some(n) = stack.pop() {
            out.push(n);
            if let Some(s) = &n.split {
                stack.push(&s.right);
                stack.push(&s.left);
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        self.nodes().into_iter().filter(|n| n.is_leaf()).collect()
    }

    pub fn predict(&self, x: f64, y: f64) -> u8 {
        let probe = Point { x, y, label: 0, weight: 1.0 };
        let mut node = &self.root;
        while let Some(s) = &node.split {
            let below = s.axis.coord(&probe) < s.threshold;
            node = if below == s.left_is_below { &s.left } else { &s.right };
        }
        node.predicted
    }
}

struct Grower<'a> {
    points: &'a [Point],
    f: &'a ImpurityFn,
    cfg: &'a GrowConfig,
}

impl Grower<'_> {
    fn node(&self, idx: Vec<usize>, depth: usize) -> TreeNode {
        let (pos, neg) = class_weights(self.points, &idx);
        let weight = pos + neg;
        let c = prevalence(pos, neg);
        let impurity = weight * self.f.value(c);
        let mut node = TreeNode {
            weight,
            c,
            impurity,
            depth,
            predicted: u8::from(pos >= neg),
            split: None,
        };
        if depth >= self.cfg.max_depth || pos == 0.0 || neg == 0.0 {
            return node;
        }
        let min_w = self.cfg.min_leaf_weight;
        let cands: Vec<Candidate> = candidates_for(self.points, &idx, &self.cfg.axes)
            .into_iter()
            .filter(|c| c.left_weight >= min_w && c.right_weight >= min_w)
            .collect();
        let values: Vec<f64> = cands
            .par_iter()
            .map(|c| children_impurity(self.f, (c.left_weight, c.split.a), (c.right_weight, c.split.b)))
            .collect();
        // ties: larger right prevalence, then enumeration order (axis, threshold).
        // The same partition reached along different axes sums its weights in
        // a different order, so right prevalences also compare within EPS_TIE.
        let Some(best) = select_min_by(&values, |i, j| cands[i].split.b > cands[j].split.b + EPS_TIE) else {
            return node;
        };
        let reduction = impurity - values[best];
        if reduction <= EPS_TIE * impurity.abs() {
            return node;
        }
        let cand = cands[best];
        let (below, above): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| cand.axis.coord(&self.points[i]) < cand.threshold);
        let (left_idx, right_idx) = if cand.left_is_below { (below, above) } else { (above, below) };
        let (left, right) = rayon::join(|| self.node(left_idx, depth + 1), || self.node(right_idx, depth + 1));
        node.split = Some(SplitInfo {
            axis: cand.axis,
            threshold: cand.threshold,
            reduction,
            ppv: cand.split.b,
            npv: 1.0 - cand.split.a,
            left_is_below: cand.left_is_below,
            left: Box::new(left),
            right: Box::new(right),
        });
        node
    }
}

/// Grows a tree by repeatedly taking the impurity-minimizing threshold.
///
/// A node becomes a leaf at `max_depth`, when pure, when no remaining
/// candidate reduces impurity by more than `EPS_TIE` relative, or when every
/// candidate leaves a child lighter than `min_leaf_weight`.
pub fn grow(data: &WeightedDataset, f: &ImpurityFn, cfg: &GrowConfig) -> Result<Tree> {
    grow_inner(data, f, cfg, 1.0)
}

fn grow_inner(data: &WeightedDataset, f: &ImpurityFn, cfg: &GrowConfig, w: f64) -> Result<Tree> {
    if cfg.max_depth == 0 {
        return Err(Error::InvalidParameter {
            name: "max_depth".into(),
            detail: "must be positive".into(),
        });
    }
    if !(cfg.min_leaf_weight >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "min_leaf_weight".into(),
            detail: format!("must be nonnegative, got {}", cfg.min_leaf_weight),
        });
    }
    if !cfg.allow_improper && !is_proper(f, DEFAULT_GRID) {
        return Err(Error::Improper { name: f.spec() });
    }
    let grower = Grower {
        points: data.points(),
        f,
        cfg,
    };
    let root = grower.node((0..data.len()).collect(), 0);
    Ok(Tree {
        function: f.spec(),
        class1_weight: w,
        root,
    })
}

/// Scales every Class-1 weight by `w`, then grows with `f`. Makes the same
/// decisions as [`grow`] on the original data with `T_w f`.
pub fn grow_weighted(data: &WeightedDataset, f: &ImpurityFn, w: WeightFactor, cfg: &GrowConfig) -> Result<Tree> {
    grow_inner(&data.reweighted(w), f, cfg, w.get())
}

/// `grow(data, T_w f)`, the other side of the weighting equivalence.
pub fn grow_transformed(data: &WeightedDataset, f: &ImpurityFn, w: WeightFactor, cfg: &GrowConfig) -> Result<Tree> {
    grow(data, &apply_tw(f, w)?, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cluster {
    pub label: u8,
    pub count: usize,
    pub mean: [f64; 2],
    pub std: [f64; 2],
    #[serde(default = "unit")]
    pub weight: f64,
}

fn unit() -> f64 {
    1.0
}

/// A seeded mixture of axis-aligned Gaussian clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    pub seed: u64,
    pub clusters: Vec<Cluster>,
}

const TWO_CLUSTER: &str = include_str!("../data/two_cluster_mixture.json");

impl MixtureConfig {
    /// Two overlapping clusters, Class 0 on the left, Class 1 on the right.
    pub fn two_cluster() -> Self {
        serde_json::from_str(TWO_CLUSTER).expect("bundled mixture config is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDataset(e.to_string()))
    }

    pub fn generate(&self) -> Result<WeightedDataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut points = Vec::new();
        for cl in &self.clusters {
            let nx = Normal::new(cl.mean[0], cl.std[0]).map_err(|e| Error::InvalidDataset(e.to_string()))?;
            let ny = Normal::new(cl.mean[1], cl.std[1]).map_err(|e| Error::InvalidDataset(e.to_string()))?;
            for _ in 0..cl.count {
                points.push(Point {
                    x: nx.sample(&mut rng),
                    y: ny.sample(&mut rng),
                    label: cl.label,
                    weight: cl.weight,
                });
            }
        }
        WeightedDataset::new(points)
    }
}
