use std::collections::BTreeMap;

use proptest::prelude::*;

use scorekit::numerics::QuadratureSpec;
use scorekit::{make_builtin, Density, DensitySpec};

fn builtin(name: &str, params: &[(&str, f64)]) -> Density {
    let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_builtin(name, &p).unwrap()
}

fn all_builtins() -> Vec<Density> {
    vec![
        builtin("normal", &[]),
        builtin("exponential", &[]),
        builtin("laplace", &[]),
        builtin("gumbel", &[]),
        builtin("student_t", &[("nu", 5.0)]),
        builtin("gamma", &[("shape", 3.0)]),
        builtin("logistic", &[]),
    ]
}

fn symmetric_builtins() -> Vec<Density> {
    all_builtins().into_iter().filter(|d| d.is_symmetric()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn location_score_odd_scale_score_even(x in 0.05f64..8.0) {
        for d in symmetric_builtins() {
            let (p, m) = (d.location_score(x).unwrap(), d.location_score(-x).unwrap());
            prop_assert!((p.phi + m.phi).abs() <= 1e-9, "{}: phi", d.name());
            prop_assert!((p.psi - m.psi).abs() <= 1e-9, "{}: psi", d.name());
            prop_assert_eq!(p.psi, 1.0 + x * p.phi);
        }
    }

    #[test]
    fn power_score_scales(c in 0.2f64..5.0, x in -4.0f64..4.0) {
        for base in [builtin("normal", &[]), builtin("logistic", &[])] {
            let g = base.power(c).unwrap();
            let lhs = g.location_score(x).unwrap().phi;
            let rhs = c * base.location_score(x).unwrap().phi;
            prop_assert!((lhs - rhs).abs() <= 1e-8, "{}: {lhs} vs {rhs}", base.name());
        }
    }
}

#[test]
fn analytic_matches_finite_difference() {
    for d in all_builtins().into_iter().filter(Density::has_analytic_score) {
        for x in d.central_grid(0.99, 101).unwrap() {
            let analytic = d.location_score(x).unwrap().phi;
            let fd = d.finite_difference_score(x).unwrap();
            assert!(
                (analytic - fd).abs() <= 1e-6 * analytic.abs().max(1.0),
                "{} at {x}: {analytic} vs {fd}",
                d.name()
            );
        }
    }
}

#[test]
fn every_density_integrates_to_one() {
    let spec = QuadratureSpec::tight();
    let mut ds = all_builtins();
    ds.push(builtin("normal", &[]).power(2.5).unwrap());
    ds.push(builtin("laplace", &[]).power(0.5).unwrap());
    ds.push(builtin("normal", &[]).scale_pair(1.0, 2.0).unwrap());
    ds.push(builtin("logistic", &[]).scale_pair(2.0, 1.0).unwrap());
    let quartic = "name = \"quartic\"\nlog_pdf = \"-x^4/4\"\nsymmetric = true\n";
    ds.push(DensitySpec::from_toml(quartic).unwrap().build().unwrap());
    for d in ds {
        let mass = d.total_mass(&spec).unwrap();
        assert!((mass - 1.0).abs() <= 1e-8, "{}: {mass}", d.name());
    }
}
