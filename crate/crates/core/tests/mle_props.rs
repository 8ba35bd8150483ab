use proptest::prelude::*;

use scorekit::mle::{self, MleKind, ReferenceEstimator};
use scorekit::{make_builtin, Density};

fn builtin(name: &str) -> Density {
    make_builtin(name, &Default::default()).unwrap()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn location_equivariance(xs in prop::collection::vec(-3.0f64..3.0, 3..8), k in -10.0f64..10.0) {
        for name in ["normal", "logistic", "gumbel", "laplace"] {
            let d = builtin(name);
            let shifted: Vec<f64> = xs.iter().map(|x| x + k).collect();
            let a = mle::solve_location_mle(&d, &xs).unwrap().estimate;
            let b = mle::solve_location_mle(&d, &shifted).unwrap().estimate;
            prop_assert!((b - (a + k)).abs() <= 1e-9 * (1.0 + k.abs()), "{name}: {a} + {k} vs {b}");
        }
    }

    #[test]
    fn scale_equivariance(xs in prop::collection::vec(0.05f64..4.0, 3..8), k in 0.1f64..10.0) {
        for name in ["normal", "logistic", "exponential"] {
            let d = builtin(name);
            let scaled: Vec<f64> = xs.iter().map(|x| k * x).collect();
            let a = mle::solve_scale_mle(&d, &xs).unwrap().estimate;
            let b = mle::solve_scale_mle(&d, &scaled).unwrap().estimate;
            prop_assert!((b - k * a).abs() <= 1e-9 * k * a, "{name}: {k}*{a} vs {b}");
        }
    }

    #[test]
    fn normal_root_is_the_mean(xs in prop::collection::vec(-50.0f64..50.0, 1..30)) {
        let sol = mle::solve_location_mle(&Density::standard_normal(), &xs).unwrap();
        let m = mean(&xs);
        prop_assert!((sol.estimate - m).abs() <= 1e-9 * (1.0 + m.abs()));
        prop_assert!(sol.residual.abs() <= 1e-6);
    }
}

#[test]
fn non_normal_witnesses() {
    let sample = mle::NEGATIVE_CONTROL_SAMPLE;
    for name in ["logistic", "laplace"] {
        let root = mle::solve_location_mle(&builtin(name), &sample).unwrap().estimate;
        assert!((root - mean(&sample)).abs() > 0.01, "{name}: {root}");
    }
}

#[test]
fn characterization_is_deterministic() {
    let d = builtin("normal");
    let a = mle::verify_characterization(&d, MleKind::Location, ReferenceEstimator::Mean, 20, 5, 7).unwrap();
    let b = mle::verify_characterization(&d, MleKind::Location, ReferenceEstimator::Mean, 20, 5, 7).unwrap();
    assert_eq!(a, b);
}

#[test]
fn power_relation_recovered_on_two_bases() {
    for name in ["normal", "laplace"] {
        let p = builtin(name);
        for c in [0.5, 1.0, 2.0, 4.0] {
            let fit = mle::fit_power_relation(&p.power(c).unwrap(), &p).unwrap();
            assert!((fit.c - c).abs() <= 1e-6 * c, "{name} c = {c}: {}", fit.c);
        }
    }
}
