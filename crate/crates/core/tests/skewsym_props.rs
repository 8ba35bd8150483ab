use proptest::prelude::*;

use scorekit::numerics::QuadratureSpec;
use scorekit::skewsym::{self, SkewSymmetricModel, SkewingArgument, SkewingCdf};
use scorekit::{make_builtin, Density};

fn builtin(name: &str) -> Density {
    make_builtin(name, &Default::default()).unwrap()
}

fn odd_arguments(base: &Density) -> Vec<SkewingArgument> {
    vec![
        SkewingArgument::Identity,
        SkewingArgument::LocationScore(base.clone()),
        SkewingArgument::SkewT { nu: 5.0 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_delta_is_the_base(x in -6.0f64..6.0, mu in -2.0f64..2.0, sigma in 0.3f64..3.0) {
        for name in ["normal", "logistic", "laplace"] {
            let base = builtin(name);
            let m = SkewSymmetricModel::new(base.clone(), SkewingCdf::Logistic, SkewingArgument::Identity, mu, sigma, 0.0)
                .unwrap();
            let expect = base.pdf((x - mu) / sigma) / sigma;
            prop_assert!((skewsym::skew_density(&m, x) - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn skew_normal_scores_are_collinear(x in -5.0f64..5.0, mu in -2.0f64..2.0, sigma in 0.3f64..3.0) {
        let m = SkewSymmetricModel::skew_normal(mu, sigma, 0.0).unwrap();
        let s = skewsym::scores_at_symmetry(&m).unwrap();
        prop_assume!(s.s_mu(x).abs() > 1e-6);
        let ratio = s.s_delta(x) / s.s_mu(x);
        let expect = (2.0 / std::f64::consts::PI).sqrt() * sigma;
        prop_assert!((ratio - expect).abs() <= 1e-9);
    }
}

#[test]
fn odd_arguments_keep_unit_mass() {
    let spec = QuadratureSpec::default();
    for name in ["normal", "logistic"] {
        let base = builtin(name);
        for arg in odd_arguments(&base) {
            for delta in [-2.0, -0.5, 0.5, 2.0] {
                let m = SkewSymmetricModel::new(base.clone(), SkewingCdf::Normal, arg.clone(), 0.0, 1.0, delta).unwrap();
                let mass = m.total_mass(&spec).unwrap();
                assert!((mass - 1.0).abs() <= 1e-8, "{name} {} {delta}: {mass}", arg.label());
            }
        }
    }
}

#[test]
fn fisher_matrix_block_structure() {
    let cases = [
        ("normal", SkewingArgument::SkewT { nu: 5.0 }),
        ("logistic", SkewingArgument::Identity),
        ("logistic", SkewingArgument::ScaleScore(builtin("normal"))),
        ("normal", SkewingArgument::ScaleScore(builtin("logistic"))),
    ];
    for (name, arg) in cases {
        let even = matches!(arg, SkewingArgument::ScaleScore(_));
        let m = SkewSymmetricModel::new(builtin(name), SkewingCdf::Normal, arg, 0.0, 1.0, 0.0).unwrap();
        let r = skewsym::fisher_info_at_symmetry(&m).unwrap();
        let lmax = r.eigenvalues[2];
        let i = r.matrix;
        assert!(i[0][1].abs() <= 1e-8 * lmax, "{name}: I_mu_sigma {}", i[0][1]);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(i[a][b], i[b][a]);
            }
        }
        assert!(r.eigenvalues[0] >= -1e-9 * lmax);
        if even {
            assert!(i[0][2].abs() <= 1e-8 * lmax, "{name}: I_mu_delta {}", i[0][2]);
        } else {
            assert!(i[1][2].abs() <= 1e-8 * lmax, "{name}: I_sigma_delta {}", i[1][2]);
        }
    }
}

#[test]
fn singular_verdict_does_not_depend_on_cdf() {
    for name in ["laplace", "logistic", "normal"] {
        let base = builtin(name);
        let verdicts: Vec<bool> = [SkewingCdf::Normal, SkewingCdf::Logistic, SkewingCdf::student(6.0).unwrap()]
            .into_iter()
            .map(|cdf| {
                let m = SkewSymmetricModel::new(base.clone(), cdf, SkewingArgument::LocationScore(base.clone()), 0.0, 1.0, 0.0)
                    .unwrap();
                skewsym::fisher_info_at_symmetry(&m).unwrap().rank_at_tol < 3
            })
            .collect();
        assert_eq!(verdicts, vec![true; 3], "{name}");
    }
}

#[test]
fn analytic_scores_match_finite_differences() {
    for m in [
        SkewSymmetricModel::skew_normal(0.5, 1.5, 0.0).unwrap(),
        SkewSymmetricModel::new(builtin("logistic"), SkewingCdf::Logistic, SkewingArgument::Identity, 0.0, 1.0, 0.0)
            .unwrap(),
    ] {
        assert!(skewsym::finite_difference_check(&m).unwrap() <= 1e-5);
    }
}
