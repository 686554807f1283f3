mod common;

use common::{close, fd, pool};
use impurity_core::{are_equivalent, standard_form, AffineNormalization, ImpurityFn};
use proptest::prelude::*;

fn pool_with_degenerate() -> Vec<ImpurityFn> {
    let mut v = pool();
    v.push(ImpurityFn::quartic_degenerate());
    v
}

proptest! {
    #[test]
    fn derivatives_match_finite_differences(i in 0usize..16, k in 1usize..=4, p in 0.01f64..0.99) {
        let f = &pool_with_degenerate()[i];
        let h = 1e-3 * p.min(1.0 - p);
        let numeric = fd(|x| f.deriv(k - 1, x), p, h);
        let exact = f.deriv(k, p);
        // relative to the derivative itself, or to the natural size of a
        // derivative of f^(k-1) where f^(k) crosses zero
        let scale = exact.abs().max(f.deriv(k - 1, p).abs() / p.min(1.0 - p)).max(1e-3);
        prop_assert!((numeric - exact).abs() <= 1e-5 * scale,
            "{} k={k} p={p}: {exact} vs {numeric}", f.spec());
    }

    #[test]
    fn standard_form_is_idempotent(i in 0usize..15, p in 0.0f64..=1.0) {
        let f = &pool()[i];
        let once = standard_form(f).unwrap();
        let twice = standard_form(&once).unwrap();
        prop_assert!((once.value(p) - twice.value(p)).abs() <= 1e-12);
        prop_assert!(once.value(0.0).abs() <= 1e-12 && once.value(1.0).abs() <= 1e-12);
        prop_assert!(close(once.deriv(2, p.clamp(1e-3, 1.0 - 1e-3)), f.deriv(2, p.clamp(1e-3, 1.0 - 1e-3)), 1e-12));
    }

    #[test]
    fn equivalence_recovers_coefficients(
        i in 0usize..15,
        a in 0.01f64..=10.0,
        b in -10.0f64..=10.0,
        c in -10.0f64..=10.0,
    ) {
        let f = &pool()[i];
        let g = f.affine(AffineNormalization::new(a, b, c).unwrap()).unwrap();
        let n = are_equivalent(f, &g, 1e-9).expect("affine image is equivalent");
        prop_assert!((n.scale - a).abs() <= 1e-8 * (1.0 + a));
        prop_assert!((n.slope - b).abs() <= 1e-8 * (1.0 + b.abs()));
        prop_assert!((n.offset - c).abs() <= 1e-8 * (1.0 + c.abs()));
    }

    #[test]
    fn spec_strings_round_trip(i in 0usize..16, p in 0.0f64..=1.0) {
        let f = &pool_with_degenerate()[i];
        let back: ImpurityFn = f.spec().parse().unwrap();
        prop_assert_eq!(back.value(p), f.value(p));
    }
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    let base = pool();
    let mut fns = base.clone();
    // scaled and shifted copies, so that nontrivial classes exist
    for f in &base[..4] {
        fns.push(f.affine(AffineNormalization::new(2.5, 1.0, -3.0).unwrap()).unwrap());
    }
    let n = fns.len();
    let eq: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| are_equivalent(&fns[i], &fns[j], 1e-9).is_some()).collect())
        .collect();
    for i in 0..n {
        assert!(eq[i][i], "{} not reflexive", fns[i].spec());
        for j in 0..n {
            assert_eq!(eq[i][j], eq[j][i], "{} / {}", fns[i].spec(), fns[j].spec());
            for k in 0..n {
                if eq[i][j] && eq[j][k] {
                    assert!(eq[i][k]);
                }
            }
        }
    }
    // gini and its affine wrapper are one class; entropy and gini are not
    assert!(eq[1][14]);
    assert!(!eq[0][1]);
}

#[test]
fn worked_standard_form() {
    let f = ImpurityFn::polynomial(vec![7.0, 5.0, -2.0]).unwrap();
    let s = standard_form(&f).unwrap();
    for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
        assert!((s.value(p) - 2.0 * p * (1.0 - p)).abs() < 1e-14);
    }
    assert!(standard_form(&ImpurityFn::quartic_degenerate()).is_err());
}
