use proptest::prelude::*;

use psinorm::chaos::{array_norm, evaluate, holder_bound, ChaosArray};
use psinorm::distribution::DistributionSpec;
use psinorm::mc::{clopper_pearson_upper, empirical_tail, CONFIDENCE};
use psinorm::scalar::{luxemburg_norm, MomentSource};
use psinorm::tail::{bernstein_min_form, g_piecewise, BernsteinParams};
use psinorm::vector::q_norm;

fn law() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|sigma| DistributionSpec::Gaussian { mean: 0.0, sigma }),
        (0.2f64..3.0).prop_map(|scale| DistributionSpec::Rademacher { scale }),
        (0.2f64..3.0).prop_map(|half_width| DistributionSpec::UniformSymmetric { half_width }),
        (0.2f64..3.0, 2.0f64..4.0).prop_map(|(lambda, shape)| DistributionSpec::SymmetrizedWeibull { lambda, shape }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn luxemburg_norm_is_homogeneous(d in law(), k in 0.1f64..10.0, p in prop::sample::select(vec![1.0, 1.5, 2.0])) {
        let base = luxemburg_norm(&MomentSource::Analytic(d), p, 1e-11).unwrap();
        let big = luxemburg_norm(&MomentSource::Analytic(d.scaled(k)), p, 1e-11).unwrap();
        prop_assert!((big.value - k * base.value).abs() <= 1e-7 * k * base.value);
    }

    #[test]
    fn point_mass_norms_match_the_closed_form(c in -20.0f64..20.0, p in 1.0f64..6.0) {
        prop_assume!(c.abs() > 1e-3);
        let r = luxemburg_norm(&MomentSource::Analytic(DistributionSpec::PointMass { c }), p, 1e-12).unwrap();
        let exact = c.abs() / 2f64.ln().powf(1.0 / p);
        prop_assert!((r.value - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn chaos_is_homogeneous_of_degree_d(order in 2usize..=4, dim in 1usize..=4, seed in 0u64..1000,
                                        lambda in -3.0f64..3.0, x in prop::collection::vec(-2.0f64..2.0, 4)) {
        let a = ChaosArray::random(order, dim, seed).unwrap();
        let x = &x[..dim];
        let scaled_x: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let base = evaluate(&a, x).unwrap();
        let lhs = evaluate(&a, &scaled_x).unwrap();
        let rhs = lambda.powi(order as i32) * base;
        let scale = array_norm(&a, 1.0).unwrap() * 2f64.max(lambda.abs() * 2.0).powi(order as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn holder_bound_holds(order in 2usize..=3, dim in 1usize..=5, seed in 0u64..1000,
                          p in 1.0f64..6.0, x in prop::collection::vec(-3.0f64..3.0, 5)) {
        let a = ChaosArray::random(order, dim, seed).unwrap();
        let h = holder_bound(&a, &x[..dim], p).unwrap();
        prop_assert!(h.holds);
        prop_assert!(h.value.abs() <= h.bound * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn upper_limit_covers_the_frequency(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as u64;
        let u = clopper_pearson_upper(k, n, CONFIDENCE);
        prop_assert!(u >= k as f64 / n as f64 - 1e-12);
        prop_assert!(u <= 1.0);
        if k < n {
            prop_assert!(clopper_pearson_upper(k + 1, n, CONFIDENCE) >= u);
        }
    }

    #[test]
    fn empirical_tail_is_non_increasing(values in prop::collection::vec(-50.0f64..50.0, 1..200)) {
        let grid: Vec<f64> = (0..30).map(|i| i as f64 * 2.0).collect();
        let tail = empirical_tail(&values, &grid).unwrap();
        for w in tail.frequency.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let direct = values.iter().filter(|v| v.abs() >= grid[5]).count() as u64;
        prop_assert_eq!(tail.counts[5], direct);
    }

    #[test]
    fn piecewise_exponent_dominates_min_form(a in 0.01f64..100.0, b in 0.01f64..100.0, t in 0.0f64..1e4) {
        let params = BernsteinParams::new(a, b).unwrap();
        prop_assert!(g_piecewise(t, &params) >= bernstein_min_form(t, &params) * (1.0 - 1e-12));
    }

    #[test]
    fn q_norms_decrease_in_q(t in prop::collection::vec(-5.0f64..5.0, 1..8), q in 1.0f64..6.0) {
        prop_assert!(q_norm(&t, q + 0.5) <= q_norm(&t, q) * (1.0 + 1e-12));
        prop_assert!(q_norm(&t, f64::INFINITY) <= q_norm(&t, q + 0.5) * (1.0 + 1e-12));
    }
}
