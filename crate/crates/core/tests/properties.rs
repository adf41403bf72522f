use proptest::prelude::*;

use levelconv::extremal::{extremal_bounds_check, inf_conv, inf_max, minkowski_sum, sup_min, value_ladder};
use levelconv::gridfn::{level_set_upper, GridDomain, GridFunction, OutsideMode};
use levelconv::orlicz::{luxemburg_norm, norm_axioms_check, YoungFunction};

fn domain() -> impl Strategy<Value = GridDomain> {
    prop_oneof![
        (1usize..=16).prop_map(|k| GridDomain::new(1, 2.0, 2 * k + 1).unwrap()),
        (1usize..=4).prop_map(|k| GridDomain::new(2, 1.0, 2 * k + 1).unwrap()),
    ]
}

/// Values on a coarse lattice so that ties are common.
fn values(d: GridDomain, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0u32..=32, d.len()).prop_map(move |v| v.into_iter().map(|k| lo + (hi - lo) * k as f64 / 32.0).collect())
}

fn pair(lo: f64, hi: f64) -> impl Strategy<Value = (GridFunction, GridFunction)> {
    domain().prop_flat_map(move |d| {
        (values(d, lo, hi), values(d, lo, hi)).prop_map(move |(a, b)| {
            (GridFunction::new(d, a, OutsideMode::PlusInfinity).unwrap(), GridFunction::new(d, b, OutsideMode::PlusInfinity).unwrap())
        })
    })
}

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.0f64..4.0).prop_map(|p| YoungFunction::Power { p }),
        (1.0f64..3.0).prop_map(|p| YoungFunction::OnePlus { p }),
        Just(YoungFunction::OneInf),
        Just(YoungFunction::IndicatorUnit),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn reachable(f: &GridFunction, g: &GridFunction, keep: impl Fn(f64) -> bool) -> bool {
    let pick = |h: &GridFunction| h.values().iter().enumerate().filter(|(_, &v)| keep(v)).map(|(i, _)| i).collect::<Vec<_>>();
    !minkowski_sum(f.domain(), &pick(f), &pick(g)).is_empty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inf_max_is_negated_sup_min((f, g) in pair(-5.0, 5.0)) {
        let im = inf_max(&f, &g).unwrap();
        let dual = sup_min(&f.neg(), &g.neg()).unwrap().neg();
        prop_assert_eq!(im.values(), dual.values());
    }

    #[test]
    fn inf_max_is_reciprocal_sup_min((f, g) in pair(0.25, 4.0)) {
        let im = inf_max(&f, &g).unwrap();
        let dual = sup_min(&f.recip(), &g.recip()).unwrap().recip();
        for (a, b) in im.values().iter().zip(dual.values()) {
            prop_assert!(close(*a, *b, 1e-14), "{a} vs {b}");
        }
    }

    #[test]
    fn upper_level_sets_add((f, g) in pair(0.0, 1.0)) {
        let (f, g) = (f.with_outside(OutsideMode::MinusInfinity), g.with_outside(OutsideMode::MinusInfinity));
        let w = sup_min(&f, &g).unwrap();
        let d = *f.domain();
        for xi in value_ladder(&f, &g, 9) {
            let sum = minkowski_sum(&d, &level_set_upper(&f, xi).indices, &level_set_upper(&g, xi).indices);
            prop_assert_eq!(level_set_upper(&w, xi).indices, sum, "xi = {}", xi);
        }
    }

    #[test]
    fn extremal_node_bounds((f, g) in pair(-2.0, 3.0)) {
        let r = extremal_bounds_check(&f, &g).unwrap();
        prop_assert!(r.sup_min_min_ge && r.inf_max_max_le, "{:?}", r);
        // the equalities need the extremal nodes to add up inside the box
        let top = f.max().min(g.max());
        prop_assert_eq!(r.sup_min_max_eq, reachable(&f, &g, |v| v >= top), "{:?}", r);
        let bottom = f.min().max(g.min());
        prop_assert_eq!(r.inf_max_min_eq, reachable(&f, &g, |v| v <= bottom), "{:?}", r);
    }

    #[test]
    fn sandwich_for_nonnegative_pairs((f, g) in pair(0.0, 3.0)) {
        let r = extremal_bounds_check(&f, &g).unwrap();
        prop_assert_eq!(r.sandwich, Some(true));
    }

    #[test]
    fn inf_conv_shift_invariance((f, g) in pair(-3.0, 3.0), z in -4.0f64..4.0) {
        let a = inf_conv(&f, &g).unwrap();
        let b = inf_conv(&f.add_const(-z), &g.add_const(z)).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12, "{}", a.max_abs_diff(&b));
    }

    #[test]
    fn luxemburg_axioms((h, bump) in pair(-2.0, 2.0), phi in young(), c in -3.0f64..3.0) {
        // k dominates h, so monotonicity is exercised on every case
        let k = h.zip_map(&bump, |a, b| a.abs() + b.abs()).unwrap();
        let r = norm_axioms_check(&h, &k, &phi, c).unwrap();
        prop_assert!(r.all_hold(), "{:?}", r);
        prop_assert_eq!(r.monotone, Some(true));
        let nh = luxemburg_norm(&h, &phi);
        prop_assert!(nh >= 0.0);
        prop_assert_eq!(nh == 0.0, h.values().iter().all(|&v| v == 0.0));
        let sum = luxemburg_norm(&h.add(&k).unwrap(), &phi);
        prop_assert!(sum <= (nh + luxemburg_norm(&k, &phi)) * (1.0 + 1e-8), "triangle {sum}");
    }
}
