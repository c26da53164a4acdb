use fracruin::fraccalc::{gl_apply, GridFn};
use fracruin::model::{GammaComponent, MlComponent, ModelSpec};
use fracruin::montecarlo::{path_ruin_indicators, SimConfig, Truncation};
use fracruin::solver::{eval_ruin, solve, RuinSolution};
use fracruin::specialfn::{ml_cdf, MlDistParams};
use proptest::prelude::*;

/// Gamma-time models with integer claim shapes that satisfy net profit.
fn gamma_models() -> impl Strategy<Value = ModelSpec> {
    (0.3f64..3.0, 0.3f64..3.0, 1u32..=3, 0.5f64..3.0, 1.05f64..2.0).prop_map(|(r, l1, s, a, load)| {
        let c = load * (s as f64 / a) * l1 / r;
        ModelSpec::new(vec![GammaComponent::new(r, l1)], vec![], vec![GammaComponent::new(s as f64, a)], c).unwrap()
    })
}

fn ml_models() -> impl Strategy<Value = ModelSpec> {
    (0.1f64..0.95, 0.2f64..3.0, 0.5f64..3.0, 0.5f64..3.0)
        .prop_map(|(mu, l2, a, c)| ModelSpec::ml_exponential(mu, l2, a, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ruin_probability_is_a_decreasing_probability(spec in prop_oneof![gamma_models(), ml_models()]) {
        let sol = solve(&spec).unwrap();
        let mut prev = 1.0;
        for i in 0..40 {
            let psi = eval_ruin(&sol, 0.25 * i as f64).unwrap();
            prop_assert!((0.0..=1.0).contains(&psi));
            prop_assert!(psi <= prev + 1e-12);
            prev = psi;
        }
    }

    #[test]
    fn solutions_round_trip_through_json(spec in gamma_models()) {
        let sol = solve(&spec).unwrap();
        let back = RuinSolution::from_json(&sol.to_json()).unwrap();
        prop_assert_eq!(&back, &sol);
    }

    #[test]
    fn more_premium_means_less_ruin(spec in gamma_models(), extra in 0.05f64..1.0) {
        let raw = spec.to_raw();
        let mut richer = raw.clone();
        richer.apply_override("c", spec.premium_rate() * (1.0 + extra)).unwrap();
        let a = solve(&spec).unwrap();
        let b = solve(&fracruin::model::validate(&richer).unwrap()).unwrap();
        for u in [0.0, 1.0, 5.0] {
            prop_assert!(eval_ruin(&b, u).unwrap() <= eval_ruin(&a, u).unwrap() + 1e-10);
        }
    }

    #[test]
    fn ml_cdf_is_a_distribution_function(mu in 0.1f64..1.0, lambda in 0.2f64..5.0) {
        let p = MlDistParams::new(mu, lambda).unwrap();
        let mut prev = 0.0;
        for i in 1..30 {
            let v = ml_cdf(p, 0.3 * i as f64).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn grunwald_letnikov_is_linear(q in -1.5f64..2.5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = GridFn::sample(|x| (2.0 * x).sin(), 1e-2, 2.0).unwrap();
        let g = GridFn::sample(|x| x * x, 1e-2, 2.0).unwrap();
        let comb = f.linear_combination(a, &g, b).unwrap();
        let lhs = gl_apply(comb.values(), q, f.h());
        let (fa, gb) = (gl_apply(f.values(), q, f.h()), gl_apply(g.values(), q, f.h()));
        for i in 0..lhs.len() {
            let rhs = a * fa[i] + b * gb[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn ruin_indicators_are_monotone_in_capital(seed in any::<u64>(), path in 0u64..1000, mu in 0.3f64..1.0) {
        let spec = ModelSpec::new(vec![], vec![MlComponent::new(mu, 1.0)], vec![GammaComponent::new(1.0, 1.0)], 1.5).unwrap();
        let cfg = SimConfig::new(1, Truncation::ClaimCount(2000), seed).unwrap();
        let us = [0.0, 0.3, 1.0, 3.0];
        let ind = path_ruin_indicators(&spec, &us, &cfg, path).unwrap();
        for w in ind.windows(2) {
            prop_assert!(!w[1] || w[0]);
        }
    }
}
