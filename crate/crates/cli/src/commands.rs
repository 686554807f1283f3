use impurity_core::purity::{empirical_purity_check, find_witness, ratio_monotone, Relation};
use impurity_core::split::{confusion, evaluate_splits, optimal_index, TieBreak};
use impurity_core::tree::{grow_weighted, Axis, GrowConfig, MixtureConfig, WeightedDataset};
use impurity_core::weighting::{apply_tw, cost_insensitivity, g_profile, DEFAULT_G_TOL};
use impurity_core::{
    is_preimpurity, is_proper, realize_splits, split_impurity, ImpurityFn, NodeSummary, SplitPoint, WeightFactor,
    CATALOG, DEFAULT_GRID,
};
use serde_json::{json, Value};

use crate::output::{g17, to_csv, to_json};
use crate::{verify, CliError, Cli, Command, Format, TieArg};

pub struct Output {
    pub text: String,
    /// Becomes the exit status; only `verify` can fail without an error.
    pub success: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, success: true }
    }
}

fn parse_fn(spec: &str) -> Result<ImpurityFn, CliError> {
    Ok(spec.parse::<ImpurityFn>()?)
}

fn parse_pair(s: &str) -> Result<SplitPoint, CliError> {
    let bad = || CliError::new("usage", format!("expected `a:b`, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok(SplitPoint::new(a, b))
}

fn parse_pairs(s: &str) -> Result<Vec<SplitPoint>, CliError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_pair).collect()
}

fn json_only(cli: &Cli, name: &str) -> Result<(), CliError> {
    if cli.format == Some(Format::Csv) {
        return Err(CliError::new("usage", format!("`{name}` has no CSV output")));
    }
    Ok(())
}

fn wants_json(cli: &Cli) -> bool {
    cli.format == Some(Format::Json)
}

pub fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Catalog(a) => {
            json_only(cli, "catalog")?;
            let functions = match &a.function {
                Some(spec) => vec![describe(&parse_fn(spec)?)],
                None => CATALOG
                    .iter()
                    .map(|e| {
                        let f = ImpurityFn::catalog(e.name, e.example)?;
                        let mut d = describe(&f);
                        let head = json!({ "name": e.name, "formula": e.formula, "params": e.params });
                        merge(head, &mut d);
                        Ok(d)
                    })
                    .collect::<Result<Vec<_>, CliError>>()?,
            };
            Ok(Output::ok(to_json(&json!({ "seed": seed, "functions": functions }))?))
        }
        Command::Split(a) => {
            json_only(cli, "split")?;
            split(seed, &parse_fn(&a.function)?, a.c, a.weight, &parse_pairs(&a.candidates)?, a.tie)
        }
        Command::Compare(a) => {
            json_only(cli, "compare")?;
            compare(seed, &parse_fn(&a.f)?, &parse_fn(&a.g)?, a.trials, a.grid, a.tol)
        }
        Command::Transform(a) => {
            json_only(cli, "transform")?;
            let f = parse_fn(&a.function)?;
            let t = apply_tw(&f, WeightFactor::new(a.w)?)?;
            if a.raw {
                return Ok(Output::ok(format!("{t}\n")));
            }
            Ok(Output::ok(to_json(&json!({
                "seed": seed,
                "input": f.spec(),
                "w": a.w,
                "spec": t.spec(),
            }))?))
        }
        Command::Gprofile(a) => {
            let f = parse_fn(&a.function)?;
            let prof = g_profile(&f, a.grid)?;
            if wants_json(cli) {
                let (p, g) = prof.min();
                return Ok(Output::ok(to_json(&json!({
                    "seed": seed,
                    "function": f.spec(),
                    "min": { "p": p, "G": g },
                    "profile": prof,
                }))?));
            }
            let rows: Vec<Vec<String>> = (0..prof.len())
                .map(|i| vec![g17(prof.p[i]), g17(prof.g[i]), g17(prof.h[i]), g17(prof.h_prime[i])])
                .collect();
            Ok(Output::ok(to_csv(&["p", "G", "H", "Hprime"], &rows)?))
        }
        Command::Realize(a) => {
            let d = realize_splits(a.c, parse_pair(&a.s1)?, parse_pair(&a.s2)?)?;
            if wants_json(cli) {
                return Ok(Output::ok(to_json(&json!({
                    "seed": seed,
                    "dataset": d,
                    "prevalences": d.prevalences(),
                }))?));
            }
            let rows: Vec<Vec<String>> = d
                .points
                .iter()
                .map(|q| {
                    vec![q.quadrant.to_string(), q.class.to_string(), g17(q.weight), g17(q.x), g17(q.y)]
                })
                .collect();
            Ok(Output::ok(to_csv(&["quadrant", "class", "weight", "x", "y"], &rows)?))
        }
        Command::Grow(a) => {
            json_only(cli, "grow")?;
            let data = match (&a.data, a.mixture.as_deref()) {
                (Some(path), _) => WeightedDataset::from_path(path)?,
                (None, Some("two-cluster")) => MixtureConfig::two_cluster().generate()?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{path}: {e}")))?;
                    MixtureConfig::from_json(&text)?.generate()?
                }
                (None, None) => return Err(CliError::new("usage", "one of --data or --mixture is required")),
            };
            let axes = a
                .axes
                .split(',')
                .map(|s| match s.trim() {
                    "x" => Ok(Axis::X),
                    "y" => Ok(Axis::Y),
                    other => Err(CliError::new("usage", format!("unknown axis `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = GrowConfig {
                max_depth: a.max_depth,
                min_leaf_weight: a.min_leaf_weight,
                axes,
                allow_improper: a.allow_improper,
            };
            let f = parse_fn(&a.function)?;
            let tree = grow_weighted(&data, &f, WeightFactor::new(a.class1_weight)?, &cfg)?;
            Ok(Output::ok(to_json(&json!({
                "seed": seed,
                "function": tree.function,
                "class1_weight": tree.class1_weight,
                "points": data.len(),
                "root": tree.root,
            }))?))
        }
        Command::Plotdata(a) => plotdata(cli, &parse_fn(&a.function)?, a.c, &parse_pairs(&a.splits)?),
        Command::Verify(a) => {
            json_only(cli, "verify")?;
            let report = verify::run(a.suite, seed, a.trials);
            Ok(Output {
                success: report.passed,
                text: to_json(&report.json)?,
            })
        }
    }
}

fn merge(head: Value, body: &mut Value) {
    if let (Value::Object(h), Value::Object(b)) = (head, body) {
        let rest = std::mem::take(b);
        *b = h;
        b.extend(rest);
    }
}

fn describe(f: &ImpurityFn) -> Value {
    let axioms = is_preimpurity(f, DEFAULT_GRID);
    let g = match g_profile(f, DEFAULT_GRID) {
        Ok(prof) => {
            let (min_p, min) = prof.min();
            let max = prof.g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            json!({
                "min": min,
                "min_at": min_p,
                "max": max,
                "constant": max - min <= DEFAULT_G_TOL,
                "respects_class_weighting": min >= -DEFAULT_G_TOL,
            })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    let insensitive = cost_insensitivity(f, DEFAULT_GRID, DEFAULT_G_TOL)
        .map(|r| Value::Bool(r.is_insensitive()))
        .unwrap_or(Value::Null);
    json!({
        "spec": f.spec(),
        "preimpurity": axioms.holds,
        "proper": is_proper(f, DEFAULT_GRID),
        "G": g,
        "cost_insensitive": insensitive,
    })
}

fn split(
    seed: u64,
    f: &ImpurityFn,
    c: f64,
    weight: f64,
    cands: &[SplitPoint],
    tie: TieArg,
) -> Result<Output, CliError> {
    let node = NodeSummary::new(weight, c)?;
    let tie = match tie {
        TieArg::MaxRight => TieBreak::MaxRight,
        TieArg::MinLeft => TieBreak::MinLeft,
    };
    let values = evaluate_splits(f, &node, cands)?;
    let best = optimal_index(f, &node, cands, tie)?;
    let node_imp = node.impurity(f);
    let rows: Vec<Value> = cands
        .iter()
        .zip(&values)
        .map(|(s, v)| {
            json!({
                "a": s.a,
                "b": s.b,
                "impurity": v,
                "reduction": node_imp - v,
                "ppv": s.ppv(),
                "npv": s.npv(),
                "confusion": confusion(&node, s).ok(),
            })
        })
        .collect();
    let w = cands[best];
    Ok(Output::ok(to_json(&json!({
        "seed": seed,
        "function": f.spec(),
        "node": { "W": weight, "c": c, "impurity": node_imp },
        "tie_break": if tie == TieBreak::MaxRight { "max-right" } else { "min-left" },
        "candidates": rows,
        "winner": { "index": best, "a": w.a, "b": w.b, "impurity": values[best], "ppv": w.ppv(), "npv": w.npv() },
    }))?))
}

fn compare(seed: u64, f: &ImpurityFn, g: &ImpurityFn, trials: u64, grid: usize, tol: f64) -> Result<Output, CliError> {
    let verdict = ratio_monotone(f, g, grid, tol)?;
    // corroborate the claimed direction by sampling
    let empirical = match verdict.relation {
        Relation::GMorePositivelyPure => json!({ "claim": "g over f", "report": empirical_purity_check(g, f, trials, seed) }),
        _ => json!({ "claim": "f over g", "report": empirical_purity_check(f, g, trials, seed) }),
    };
    Ok(Output::ok(to_json(&json!({
        "seed": seed,
        "f": f.spec(),
        "g": g.spec(),
        "relation": verdict.relation,
        "evidence": verdict.evidence,
        "empirical": empirical,
        "witness": find_witness(f, g),
        "reverse_witness": find_witness(g, f),
    }))?))
}

const PLOT_POINTS: usize = 512;

fn plotdata(cli: &Cli, f: &ImpurityFn, c: f64, splits: &[SplitPoint]) -> Result<Output, CliError> {
    let node = NodeSummary::unit(c)?;
    let chords = splits
        .iter()
        .map(|s| Ok((*s, split_impurity(f, &node, s)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let curve: Vec<(f64, f64)> = (0..PLOT_POINTS)
        .map(|i| {
            let p = i as f64 / (PLOT_POINTS - 1) as f64;
            (p, f.value(p))
        })
        .collect();
    if wants_json(cli) {
        let chords: Vec<Value> = chords
            .iter()
            .map(|(s, v)| json!({ "a": s.a, "fa": f.value(s.a), "b": s.b, "fb": f.value(s.b), "c": c, "chord": v }))
            .collect();
        let curve: Vec<Value> = curve.iter().map(|(p, v)| json!({ "p": p, "f": v })).collect();
        return Ok(Output::ok(to_json(&json!({
            "seed": cli.seed,
            "function": f.spec(),
            "curve": curve,
            "chords": chords,
        }))?));
    }
    let empty = String::new;
    let mut rows: Vec<Vec<String>> = curve
        .iter()
        .map(|(p, v)| vec!["curve".into(), g17(*p), g17(*v), empty(), empty(), empty(), empty(), empty(), empty()])
        .collect();
    for (s, v) in &chords {
        rows.push(vec![
            "chord".into(),
            empty(),
            empty(),
            g17(s.a),
            g17(f.value(s.a)),
            g17(s.b),
            g17(f.value(s.b)),
            g17(c),
            g17(*v),
        ]);
    }
    Ok(Output::ok(to_csv(&["kind", "p", "f", "a", "fa", "b", "fb", "c", "chord"], &rows)?))
}
