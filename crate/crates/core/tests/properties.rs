use moq_core::param_family::{c_coefficients, g_compose_check, DEFAULT_MAX_TERMS};
use moq_core::sampling::envelope_constant;
use moq_core::{BaselineModel, ExtendedDistribution, ParameterVector};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ParameterVector> {
    prop::collection::vec(-3.0f64..3.0, 1..=6)
        .prop_map(|ln| ParameterVector::new(ln.into_iter().map(f64::exp).collect()).unwrap())
}

fn corollary_params() -> impl Strategy<Value = ParameterVector> {
    (prop::collection::vec(0.05f64..1.0, 0..=4), 0.01f64..2.0).prop_map(|(rest, extra)| {
        let q = rest.len() + 1;
        let mut a = vec![q as f64 - rest.iter().sum::<f64>() + extra];
        a.extend(rest);
        ParameterVector::new(a).unwrap()
    })
}

fn baseline() -> impl Strategy<Value = BaselineModel> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|s| BaselineModel::exponential(s).unwrap()),
        (0.2f64..5.0, 0.3f64..4.0).prop_map(|(s, k)| BaselineModel::weibull(s, k).unwrap()),
        (0.2f64..5.0, 0.3f64..4.0).prop_map(|(s, k)| BaselineModel::log_logistic(s, k).unwrap()),
        (0.2f64..5.0, 0.3f64..4.0, 0.3f64..3.0)
            .prop_map(|(s, k, p)| BaselineModel::generalized_weibull(s, k, p).unwrap()),
    ]
}

proptest! {
    #[test]
    fn g_is_a_distribution_function_on_the_unit_interval(p in params(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        let (glo, ghi) = (p.g(lo).unwrap(), p.g(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&glo) && (0.0..=1.0).contains(&ghi));
        prop_assert!(glo <= ghi);
        prop_assert!(p.g_prime(lo).unwrap() >= 0.0);
        prop_assert!((p.g_complement(lo).unwrap() - (1.0 - glo)).abs() <= 1e-14);
    }

    #[test]
    fn g_inverse_round_trips(p in params(), t in 0.001f64..0.999) {
        let u = p.g_inverse(t).unwrap();
        prop_assert!((p.g(u).unwrap() - t).abs() <= 1e-12);
    }

    #[test]
    fn envelope_dominates_the_density_ratio(p in params(), u in 0.0f64..=1.0) {
        prop_assert!(p.g_prime(u).unwrap() <= envelope_constant(&p));
    }

    #[test]
    fn composition_with_equal_parameters(p in params(), b in 0.1f64..10.0, u in 0.0f64..1.0) {
        let (lhs, rhs) = g_compose_check(&p, b, u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn c_coefficients_form_a_pmf_under_the_corollary(p in corollary_params()) {
        let c = c_coefficients(&p, 1e-13, DEFAULT_MAX_TERMS).unwrap();
        prop_assert!(c.values().iter().all(|&v| v >= 0.0));
        prop_assert!((c.values().iter().sum::<f64>() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn extended_cdf_and_quantile_agree(p in params(), b in baseline(), t in 0.01f64..0.99) {
        let d = ExtendedDistribution::new(b, p);
        let x = d.quantile(t).unwrap();
        prop_assert!((d.cdf(x) - t).abs() <= 1e-9, "x = {x}");
        prop_assert!((d.cdf(x) + d.sf(x) - 1.0).abs() <= 1e-14);
        prop_assert!(d.pdf(x) >= 0.0);
    }
}
