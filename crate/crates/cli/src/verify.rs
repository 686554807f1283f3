//! Invariant suites behind `impurity verify`.

use impurity_core::purity::{
    empirical_negative_purity_check, empirical_purity_check, find_witness, maximizer_order_check, ratio_monotone,
    realize_splits, vanish_at, Relation, DEFAULT_RATIO_TOL,
};
use impurity_core::split::{optimal_index, NodeSummary, SplitPoint, TieBreak};
use impurity_core::tree::{grow, grow_transformed, grow_weighted, GrowConfig, WeightedDataset};
use impurity_core::weighting::{apply_tw, cost_insensitivity, g_at, g_profile, WeightFactor, DEFAULT_G_TOL};
use impurity_core::{
    are_equivalent, is_preimpurity, is_proper, standard_form, AffineNormalization, ImpurityFn, CATALOG, DEFAULT_GRID,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::Suite;

pub struct Report {
    pub passed: bool,
    pub json: Value,
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: Value,
}

fn check(name: &'static str, passed: bool, detail: Value) -> Check {
    Check { name, passed, detail }
}

fn wf(w: f64) -> WeightFactor {
    WeightFactor::new(w).expect("positive weight")
}

fn cube() -> ImpurityFn {
    ImpurityFn::power_minus(3.0).expect("valid exponent")
}

fn pool() -> Vec<ImpurityFn> {
    let mut v: Vec<ImpurityFn> = CATALOG
        .iter()
        .filter(|e| e.name != "quartic-degenerate")
        .map(|e| ImpurityFn::catalog(e.name, e.example).expect("catalog examples are valid"))
        .collect();
    v.push(apply_tw(&ImpurityFn::entropy(), wf(2.5)).expect("valid transform"));
    v
}

fn ordered_pairs() -> Vec<(ImpurityFn, ImpurityFn)> {
    let ci = |a| ImpurityFn::cost_insensitive(a).expect("alpha in (0, 1)");
    let h = |m| ImpurityFn::mzr(m).expect("m in (0, 1)");
    vec![(cube(), ImpurityFn::gini()), (ci(0.7), ci(0.3)), (h(0.7), h(0.3))]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn axioms(rng: &mut ChaCha8Rng, trials: u64) -> Vec<Check> {
    let mut out = Vec::new();

    let mut wrong = Vec::new();
    for e in CATALOG {
        let f = ImpurityFn::catalog(e.name, e.example).expect("catalog examples are valid");
        let expect = e.name != "quartic-degenerate";
        if is_preimpurity(&f, DEFAULT_GRID).holds != expect || is_proper(&f, DEFAULT_GRID) != expect {
            wrong.push(f.spec());
        }
    }
    let linear = ImpurityFn::polynomial(vec![0.0, 1.0]).expect("valid coefficients");
    if is_preimpurity(&linear, DEFAULT_GRID).holds || !is_proper(&linear, DEFAULT_GRID) {
        wrong.push(linear.spec());
    }
    out.push(check("catalog-axioms", wrong.is_empty(), json!({ "unexpected": wrong })));

    let fns = pool();
    let mut worst: (f64, Value) = (0.0, Value::Null);
    for _ in 0..trials {
        let f = &fns[rng.random_range(0..fns.len())];
        let k = rng.random_range(1..=4);
        let p: f64 = rng.random_range(0.01..0.99);
        let h = 1e-3 * p.min(1.0 - p);
        let g = |x: f64| f.deriv(k - 1, x);
        let numeric = (g(p - 2.0 * h) - 8.0 * g(p - h) + 8.0 * g(p + h) - g(p + 2.0 * h)) / (12.0 * h);
        let exact = f.deriv(k, p);
        let scale = exact.abs().max(g(p).abs() / p.min(1.0 - p)).max(1e-3);
        let err = (numeric - exact).abs() / scale;
        if err > worst.0 {
            worst = (err, json!({ "spec": f.spec(), "k": k, "p": p }));
        }
    }
    out.push(check(
        "derivative-consistency",
        worst.0 <= 1e-5,
        json!({ "max_rel_err": worst.0, "at": worst.1 }),
    ));

    let mut worst = 0.0f64;
    for f in &fns {
        let once = standard_form(f).expect("pool members are preimpurity functions");
        let twice = standard_form(&once).expect("still a preimpurity function");
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            worst = worst.max((once.value(p) - twice.value(p)).abs());
        }
    }
    out.push(check("standard-form-idempotence", worst <= 1e-12, json!({ "max_abs_err": worst })));

    let mut worst = 0.0f64;
    let mut misses = 0;
    for _ in 0..trials.min(200) {
        let f = &fns[rng.random_range(0..fns.len())];
        let (a, b, c) = (
            rng.random_range(0.01..=10.0),
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
        );
        let g = f.affine(AffineNormalization::new(a, b, c).expect("positive scale")).expect("valid affine");
        match are_equivalent(f, &g, 1e-9) {
            Some(n) => worst = worst.max(rel(n.scale, a)).max(rel(n.slope, b)).max(rel(n.offset, c)),
            None => misses += 1,
        }
    }
    out.push(check(
        "equivalence-recovery",
        misses == 0 && worst <= 1e-8,
        json!({ "missed": misses, "max_rel_err": worst }),
    ));
    out
}

fn weighting(rng: &mut ChaCha8Rng, trials: u64) -> Vec<Check> {
    let mut out = Vec::new();

    let mut cases = vec![(ImpurityFn::entropy(), 1.0), (ImpurityFn::gini(), 3.0)];
    for a in [1.5, 2.0, 3.0] {
        cases.push((ImpurityFn::power_minus(a).expect("alpha > 1"), a + 1.0));
    }
    for a in [0.3, 0.5] {
        cases.push((ImpurityFn::power_plus(a).expect("alpha in (0, 1)"), a + 1.0));
    }
    let mut worst = 0.0f64;
    for (f, want) in &cases {
        let prof = g_profile(f, DEFAULT_GRID).expect("strictly concave");
        worst = prof.g.iter().fold(worst, |m, g| m.max((g - want).abs()));
    }
    let quartic = g_at(&ImpurityFn::sym_quartic(), 0.5).map(|t| t.0).unwrap_or(f64::NAN);
    out.push(check(
        "g-constants",
        worst <= 1e-7 && (quartic + 1.0).abs() <= 1e-12,
        json!({ "max_dev": worst, "sym_quartic_g_half": quartic }),
    ));

    let fns = pool();
    let (mut group, mut inverse) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let f = &fns[rng.random_range(0..fns.len())];
        let (w1, w2): (f64, f64) = (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0));
        let p: f64 = rng.random_range(0.0..=1.0);
        let lhs = apply_tw(&apply_tw(f, wf(w2)).expect("w > 0"), wf(w1)).expect("w > 0");
        let rhs = apply_tw(f, wf(w1 * w2)).expect("w > 0");
        let back = apply_tw(&apply_tw(f, wf(w1)).expect("w > 0"), wf(1.0 / w1)).expect("w > 0");
        group = group.max(rel(lhs.value(p), rhs.value(p)));
        inverse = inverse.max(rel(back.value(p), f.value(p)));
    }
    out.push(check("group-law", group <= 1e-10, json!({ "max_rel_err": group })));
    out.push(check("inversion", inverse <= 1e-10, json!({ "max_rel_err": inverse })));

    let mut ok = true;
    let mut scales = Vec::new();
    for alpha in [0.2, 0.5, 0.8] {
        let f = ImpurityFn::cost_insensitive(alpha).expect("alpha in (0, 1)");
        let r = cost_insensitivity(&f, DEFAULT_GRID, DEFAULT_G_TOL).expect("strictly concave");
        ok &= r.is_insensitive();
        for (w, a) in &r.scales {
            let err = a.map(|a| (a - w.powf(alpha)).abs());
            ok &= err.is_some_and(|e| e <= 1e-8);
            scales.push(json!({ "alpha": alpha, "w": w, "scale": a }));
        }
    }
    out.push(check("cost-insensitivity", ok, json!({ "scales": scales })));

    let mut worst = 0.0f64;
    for m in [0.2, 0.5, 0.8] {
        let h = ImpurityFn::mzr(m).expect("m in (0, 1)");
        let w = (1.0 / m - 1.0f64).powi(2);
        let tw = apply_tw(&ImpurityFn::gini(), wf(w)).expect("w > 0");
        let s = 1.0 / (2.0 * (1.0 - m) * (1.0 - m));
        for i in 0..512 {
            let p = i as f64 / 511.0;
            worst = worst.max((h.value(p) - s * tw.value(p)).abs());
        }
    }
    out.push(check("hm-identity", worst <= 1e-10, json!({ "max_abs_err": worst })));

    let mut bad = Vec::new();
    let ws = [0.5, 1.0, 2.0, 5.0];
    for f in [ImpurityFn::gini(), ImpurityFn::entropy(), cube()] {
        for (i, &w1) in ws.iter().enumerate() {
            for &w2 in &ws[i + 1..] {
                let t1 = apply_tw(&f, wf(w1)).expect("w > 0");
                let t2 = apply_tw(&f, wf(w2)).expect("w > 0");
                let rel = ratio_monotone(&t1, &t2, DEFAULT_GRID, DEFAULT_RATIO_TOL).map(|v| v.relation);
                if rel != Ok(Relation::FMorePositivelyPure) {
                    bad.push(json!({ "f": f.spec(), "w1": w1, "w2": w2 }));
                }
            }
        }
    }
    out.push(check("monotone-in-weight", bad.is_empty(), json!({ "violations": bad })));
    out
}

fn replays(f: &ImpurityFn, g: &ImpurityFn, c: f64, s: &[SplitPoint; 2]) -> bool {
    let Ok(node) = NodeSummary::unit(c) else {
        return false;
    };
    match (
        optimal_index(f, &node, s, TieBreak::MaxRight),
        optimal_index(g, &node, s, TieBreak::MaxRight),
    ) {
        (Ok(fi), Ok(gi)) => s[fi].b < s[gi].b,
        _ => false,
    }
}

fn purity(rng: &mut ChaCha8Rng, seed: u64, trials: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let pairs = ordered_pairs();
    let n = trials.max(1) * 10;

    let mut forward = Vec::new();
    let mut ok = true;
    for (f, g) in &pairs {
        let verdict = ratio_monotone(f, g, DEFAULT_GRID, DEFAULT_RATIO_TOL).map(|v| v.relation);
        let rep = empirical_purity_check(f, g, n, seed);
        ok &= verdict == Ok(Relation::FMorePositivelyPure) && rep.passed;
        forward.push(json!({ "f": f.spec(), "g": g.spec(), "trials": n, "passed": rep.passed, "counterexample": rep.counterexample }));
    }
    out.push(check("forward-direction", ok, json!({ "pairs": forward })));

    let converse = [(ImpurityFn::gini(), cube()), (ImpurityFn::sym_quartic(), ImpurityFn::gini())];
    let mut found = Vec::new();
    let mut ok = true;
    for (f, g) in &converse {
        let w = find_witness(f, g);
        let verified = w.as_ref().is_some_and(|w| replays(f, g, w.c, &w.splits));
        ok &= verified;
        found.push(json!({ "f": f.spec(), "g": g.spec(), "verified": verified, "witness": w }));
    }
    for (f, g) in &pairs {
        ok &= find_witness(f, g).is_none();
    }
    out.push(check("converse-witnesses", ok, json!({ "witnesses": found })));

    let mut ok = true;
    for (f, g) in &pairs {
        ok &= empirical_negative_purity_check(g, f, n, seed).passed;
    }
    out.push(check("negative-duality", ok, json!({ "trials": n })));

    let mut violations = Vec::new();
    for i in 0..trials as usize {
        let (f, g) = &pairs[i % pairs.len()];
        let mut q: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..0.99)).collect();
        q.sort_by(f64::total_cmp);
        if q.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        let (Ok(fh), Ok(gh)) = (vanish_at(f, q[0], q[2]), vanish_at(g, q[0], q[2])) else {
            continue;
        };
        let lhs = fh.value(q[1]) / gh.value(q[1]);
        let rhs = fh.value(q[3]) / gh.value(q[3]);
        if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
            violations.push(json!({ "f": f.spec(), "g": g.spec(), "points": q }));
        }
    }
    out.push(check("ratio-inequality", violations.is_empty(), json!({ "violations": violations })));

    let ms = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut bad = Vec::new();
    for (i, &m1) in ms.iter().enumerate() {
        for &m2 in &ms[..i] {
            let f = ImpurityFn::mzr(m1).expect("m in (0, 1)");
            let g = ImpurityFn::mzr(m2).expect("m in (0, 1)");
            if !maximizer_order_check(&f, &g).is_ok_and(|c| c.holds) {
                bad.push(json!({ "m1": m1, "m2": m2 }));
            }
        }
    }
    out.push(check("maximizer-order", bad.is_empty(), json!({ "violations": bad })));
    out
}

fn realizer(rng: &mut ChaCha8Rng, trials: u64) -> Vec<Check> {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..trials {
        let c: f64 = rng.random_range(0.01..0.99);
        let mut pick = || {
            if rng.random_bool(0.25) {
                SplitPoint::degenerate(c)
            } else {
                SplitPoint::new(c * rng.random::<f64>(), c + (1.0 - c) * (1.0 - rng.random::<f64>()))
            }
        };
        let (s1, s2) = (pick(), pick());
        if s1.validate(c).is_err() || s2.validate(c).is_err() {
            continue;
        }
        match realize_splits(c, s1, s2) {
            Ok(d) => worst = worst.max(d.max_error()),
            Err(e) => failures.push(json!({ "c": c, "s1": s1, "s2": s2, "error": e.to_string() })),
        }
    }
    vec![check(
        "round-trip",
        failures.is_empty() && worst <= 1e-10,
        json!({ "cases": trials, "max_error": worst, "failures": failures }),
    )]
}

fn tree(rng: &mut ChaCha8Rng, trials: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let cfg = GrowConfig::default();
    let datasets = (trials / 20).max(1);

    let mut mismatches = Vec::new();
    let mut compared = 0;
    for _ in 0..datasets {
        let seed: u64 = rng.random();
        let n = rng.random_range(30..=100);
        let data = WeightedDataset::random(seed, n).expect("n > 0");
        for f in [ImpurityFn::gini(), ImpurityFn::entropy(), cube()] {
            for w in [0.2, 0.5, 2.0, 5.0] {
                let a = grow_weighted(&data, &f, wf(w), &cfg).map(|t| t.splits());
                let b = grow_transformed(&data, &f, wf(w), &cfg).map(|t| t.splits());
                compared += 1;
                if a.is_err() || a != b {
                    mismatches.push(json!({ "dataset_seed": seed, "points": n, "f": f.spec(), "w": w }));
                }
            }
        }
    }
    out.push(check(
        "weighting-equivalence",
        mismatches.is_empty(),
        json!({ "tree_pairs": compared, "mismatches": mismatches }),
    ));

    let data = WeightedDataset::from_labels("010").expect("valid labels");
    let f = ImpurityFn::quartic_degenerate();
    let node = data.summary().impurity(&f);
    let forced = GrowConfig {
        allow_improper: true,
        ..GrowConfig::default()
    };
    let stays_leaf = grow(&data, &f, &forced).is_ok_and(|t| t.root.is_leaf());
    let rejected = grow(&data, &f, &cfg).is_err();
    out.push(check(
        "stuck-node",
        stays_leaf && rejected && ((node - 16.0 / 2187.0) / node).abs() <= 1e-15,
        json!({ "node_impurity": node, "stays_leaf": stays_leaf, "rejected_without_override": rejected }),
    ));

    let mut unstable = Vec::new();
    for _ in 0..datasets.min(10) {
        let seed: u64 = rng.random();
        let data = WeightedDataset::random(seed, 60).expect("n > 0");
        let f = ImpurityFn::cost_insensitive(0.3).expect("alpha in (0, 1)");
        let base = grow_weighted(&data, &f, wf(1.0), &cfg).map(|t| t.splits());
        for w in [0.25, 0.5, 2.0, 4.0] {
            if grow_weighted(&data, &f, wf(w), &cfg).map(|t| t.splits()) != base {
                unstable.push(json!({ "dataset_seed": seed, "w": w }));
            }
        }
    }
    out.push(check("cost-insensitive-stability", unstable.is_empty(), json!({ "unstable": unstable })));
    out
}

pub fn run(suite: Suite, seed: u64, trials: u64) -> Report {
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Axioms, Suite::Weighting, Suite::Purity, Suite::Realizer, Suite::Tree],
        s => std::slice::from_ref(match s {
            Suite::Axioms => &Suite::Axioms,
            Suite::Weighting => &Suite::Weighting,
            Suite::Purity => &Suite::Purity,
            Suite::Realizer => &Suite::Realizer,
            _ => &Suite::Tree,
        }),
    };
    let mut results = Vec::new();
    let mut passed = true;
    for (i, s) in suites.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (name, checks) = match s {
            Suite::Axioms => ("axioms", axioms(&mut rng, trials)),
            Suite::Weighting => ("weighting", weighting(&mut rng, trials)),
            Suite::Purity => ("purity", purity(&mut rng, seed, trials)),
            Suite::Realizer => ("realizer", realizer(&mut rng, trials)),
            Suite::Tree | Suite::All => ("tree", tree(&mut rng, trials)),
        };
        let suite_ok = checks.iter().all(|c| c.passed);
        passed &= suite_ok;
        let checks: Vec<Value> = checks
            .into_iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect();
        results.push(json!({ "suite": name, "passed": suite_ok, "checks": checks }));
    }
    Report {
        passed,
        json: json!({ "seed": seed, "trials": trials, "passed": passed, "suites": results }),
    }
}
