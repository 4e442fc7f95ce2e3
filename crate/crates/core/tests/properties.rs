use hcontent::choquet::{choquet_integral, choquet_integral_power, Backend, Content};
use hcontent::content::{ball_content_upper, dyadic_content, ContentParams};
use hcontent::io::{function_digest, function_from_json, function_to_json};
use hcontent::{Grid, GridFunction, GridSet};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

fn grid() -> impl Strategy<Value = Grid> {
    (1usize..=2, 1u32..=3).prop_map(|(n, l)| Grid::new(n, l).unwrap())
}

fn set_on(g: Grid) -> impl Strategy<Value = GridSet> {
    prop::collection::vec(any::<bool>(), g.len()).prop_map(move |c| GridSet::from_cells(g, c).unwrap())
}

fn two_sets() -> impl Strategy<Value = (GridSet, GridSet)> {
    grid().prop_flat_map(|g| (set_on(g), set_on(g)))
}

// nonnegative simple function with a few levels and some zeros
fn function_on(g: Grid) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.1f64..4.0], g.len())
        .prop_map(move |v| GridFunction::from_values(g, v).unwrap())
}

fn function() -> impl Strategy<Value = GridFunction> {
    grid().prop_flat_map(function_on)
}

fn delta_for(n: usize, t: f64) -> f64 {
    0.25 + t * (n as f64 - 0.25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dyadic_content_is_monotone_and_strongly_subadditive((a, b) in two_sets(), t in 0.0f64..=1.0) {
        let d = delta_for(a.grid().n(), t);
        let h = |s: &GridSet| dyadic_content(s, d).unwrap().value;
        let (u, i) = (a.union(&b).unwrap(), a.intersection(&b).unwrap());
        prop_assert!(h(&i) <= h(&a) * (1.0 + 1e-12));
        prop_assert!(h(&a) <= h(&u) * (1.0 + 1e-12));
        prop_assert!(h(&u) + h(&i) <= (h(&a) + h(&b)) * (1.0 + 1e-12));
    }

    #[test]
    fn dyadic_certificate_covers_and_costs_the_value((a, _) in two_sets(), t in 0.0f64..=1.0) {
        let r = dyadic_content(&a, delta_for(a.grid().n(), t)).unwrap();
        prop_assert!(r.certificate_covers(&a));
        prop_assert!(close(r.certificate_cost(), r.value));
    }

    #[test]
    fn dyadic_content_ignores_grid_refinement((a, _) in two_sets(), t in 0.0f64..=1.0) {
        let d = delta_for(a.grid().n(), t);
        let fine = a.upsample(1).unwrap();
        prop_assert!(close(dyadic_content(&a, d).unwrap().value, dyadic_content(&fine, d).unwrap().value));
    }

    #[test]
    fn greedy_ball_certificate_covers_the_set((a, _) in two_sets(), t in 0.0f64..=1.0) {
        let params = ContentParams::new(delta_for(a.grid().n(), t));
        let r = ball_content_upper(&a, &params).unwrap();
        prop_assert!(r.certificate_covers(&a));
        prop_assert!(r.value <= r.certificate_cost() * (1.0 + 1e-12));
    }

    #[test]
    fn choquet_integral_of_indicator_is_content((a, _) in two_sets(), t in 0.0f64..=1.0) {
        let d = delta_for(a.grid().n(), t);
        let i = choquet_integral(&a.indicator(), d, Backend::DyadicExact).unwrap();
        prop_assert!(close(i, dyadic_content(&a, d).unwrap().value));
    }

    #[test]
    fn choquet_integral_is_monotone_and_homogeneous(f in function(), c in 0.01f64..100.0, t in 0.0f64..=1.0) {
        let d = delta_for(f.grid().n(), t);
        let content = Content::new(f.grid(), d, Backend::DyadicExact).unwrap();
        let i = content.integral(&f);
        prop_assert!(close(content.integral(&f.scale(c)), c * i));
        let smaller = f.map(|v| (v - 1.0).max(0.0));
        prop_assert!(content.integral(&smaller) <= i * (1.0 + 1e-12));
        prop_assert!(i <= f.max_value() * content.of_set(&f.support()) * (1.0 + 1e-12));
    }

    #[test]
    fn integral_power_matches_direct_powering(f in function(), p in 0.2f64..5.0, t in 0.0f64..=1.0) {
        let d = delta_for(f.grid().n(), t);
        let direct = choquet_integral(&f.powf(p), d, Backend::DyadicExact).unwrap();
        prop_assert!(close(choquet_integral_power(&f, p, d, Backend::DyadicExact).unwrap(), direct));
    }

    #[test]
    fn function_json_round_trip(f in function()) {
        let back = function_from_json(&function_to_json(&f)).unwrap();
        prop_assert_eq!(function_digest(&back), function_digest(&f));
        prop_assert_eq!(back.values(), f.values());
    }
}
