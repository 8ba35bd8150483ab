use proptest::prelude::*;

use scorekit::numerics::{central_diff, eig_sym3, find_root, integrate, Bracket, DiffOrder, QuadratureSpec};

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn poly_prime(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, a)| acc * x + k as f64 * a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integrate_is_linear(
        p in prop::collection::vec(-3.0f64..3.0, 4),
        q in prop::collection::vec(-3.0f64..3.0, 4),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let spec = QuadratureSpec::default();
        let w = |x: f64| (-x * x / 2.0).exp();
        let f = |x: f64| poly(&p, x) * w(x);
        let g = |x: f64| poly(&q, x) * w(x);
        let inf = f64::INFINITY;
        let lhs = integrate(|x| a * f(x) + b * g(x), -inf, inf, &spec).unwrap();
        let fi = integrate(f, -inf, inf, &spec).unwrap();
        let gi = integrate(g, -inf, inf, &spec).unwrap();
        let rhs = a * fi + b * gi;
        let tol = (1.0 + a.abs() + b.abs()) * (spec.abs_tol + spec.rel_tol * (fi.abs() + gi.abs() + lhs.abs()) + 1e-12);
        prop_assert!((lhs - rhs).abs() <= tol, "{lhs} vs {rhs}");
    }

    #[test]
    fn root_stays_in_bracket(r in -10.0f64..10.0, left in 0.01f64..20.0, right in 0.01f64..20.0, cubic in any::<bool>()) {
        let f = move |x: f64| if cubic { (x - r).powi(3) + 0.1 * (x - r) } else { (x - r).tanh() };
        let (lo, hi) = (r - left, r + right);
        let bracket = Bracket::from_fn(f, lo, hi).unwrap();
        let root = find_root(f, bracket, 1e-12).unwrap();
        prop_assert!(lo <= root && root <= hi);
        prop_assert!((root - r).abs() < 1e-6);
    }

    #[test]
    fn eigenvalues_sum_to_trace(v in prop::collection::vec(-100.0f64..100.0, 6)) {
        let m = [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]];
        let e = eig_sym3(&m).unwrap();
        let trace = v[0] + v[3] + v[5];
        let sum: f64 = e.values.iter().sum();
        let scale = v.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        prop_assert!((sum - trace).abs() <= 1e-10 * scale, "{sum} vs {trace}");
        prop_assert!(e.values[0] <= e.values[1] && e.values[1] <= e.values[2]);
    }

    #[test]
    fn central_diff_exact_on_cubics(c in prop::collection::vec(-5.0f64..5.0, 4), x in -10.0f64..10.0) {
        let d = central_diff(|t| poly(&c, t), x, DiffOrder::First).unwrap();
        let exact = poly_prime(&c, x);
        prop_assert!((d - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{d} vs {exact}");
    }
}
