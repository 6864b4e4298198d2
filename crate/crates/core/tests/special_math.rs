use deqjump::special_math::{bessel_i_scaled, integrate_adaptive, QuadratureSpec};
use proptest::prelude::*;

/// `e^{-x} sum_k (x/2)^{2k+n} / (k! (k+n)!)`, summed term by term.
fn series_oracle(n: u32, x: f64) -> f64 {
    let mut term = (-x).exp();
    for k in 1..=n {
        term *= 0.5 * x / k as f64;
    }
    let mut sum = 0.0;
    let mut k = 0.0;
    while term > 1e-300 && (k < 0.5 * x + 5.0 || term > 1e-18 * sum) {
        sum += term;
        k += 1.0;
        term *= 0.25 * x * x / (k * (k + n as f64));
    }
    sum
}

#[test]
fn matches_series_oracle() {
    assert!((bessel_i_scaled(1, 2.0).unwrap() - 0.215269).abs() < 1e-6);
    for n in [0, 1, 2, 7, 30, 49] {
        for x in [0.01, 0.5, 2.0, 11.0, 29.0] {
            let want = series_oracle(n, x);
            let got = bessel_i_scaled(n as i64, x).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "n={n} x={x}: {got} vs {want}"
            );
        }
    }
    assert_eq!(
        bessel_i_scaled(-3, 5.0).unwrap(),
        bessel_i_scaled(3, 5.0).unwrap()
    );
}

#[test]
fn skellam_kernel_against_midpoint_rule() {
    // int_0^1 e^{-3u} I_0(2u) du = int_0^1 e^{-u} [e^{-2u} I_0(2u)] du
    let panels = 1_000_000;
    let h = 1.0 / panels as f64;
    let oracle: f64 = (0..panels)
        .map(|i| {
            let u = (i as f64 + 0.5) * h;
            (-u).exp() * series_oracle(0, 2.0 * u)
        })
        .sum::<f64>()
        * h;
    let spec = QuadratureSpec::default();
    let got = integrate_adaptive(
        |u: f64| (-u).exp() * bessel_i_scaled(0, 2.0 * u).unwrap(),
        0.0,
        1.0,
        &spec,
    )
    .unwrap();
    assert!(
        (got.value - oracle).abs() < 1e-11,
        "{} vs {oracle}",
        got.value
    );
    assert!(got.error_estimate < 1e-9);
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn three_term_recurrence(n in 1i64..400, x in log_uniform(1e-2, 1e5)) {
        let below = bessel_i_scaled(n - 1, x).unwrap();
        let mid = bessel_i_scaled(n, x).unwrap();
        let above = bessel_i_scaled(n + 1, x).unwrap();
        prop_assume!(above > 1e-280);
        let rhs = 2.0 * n as f64 / x * mid;
        prop_assert!(((below - above) - rhs).abs() <= 1e-9 * rhs, "n={} x={}", n, x);
    }

    #[test]
    fn generating_function_normalization(x in 1e-3f64..50.0) {
        let cut = (x + 40.0 * x.sqrt() + 40.0).ceil() as i64;
        let total: f64 = (-cut..=cut).map(|n| bessel_i_scaled(n, x).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "x={} total={}", x, total);
    }

    #[test]
    fn decreasing_in_order(n in 0i64..2000, x in log_uniform(1e-3, 1e6)) {
        let a = bessel_i_scaled(n, x).unwrap();
        let b = bessel_i_scaled(n + 1, x).unwrap();
        prop_assert!(a >= b && b >= 0.0, "n={} x={} {} {}", n, x, a, b);
    }

    #[test]
    fn quadrature_of_polynomials_is_exact(c in proptest::collection::vec(-5.0f64..5.0, 1..8), b in 0.1f64..4.0) {
        let f = |x: f64| c.iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let exact: f64 = c.iter().enumerate().map(|(j, &k)| k * b.powi(j as i32 + 1) / (j as f64 + 1.0)).sum();
        let got = integrate_adaptive(f, 0.0, b, &QuadratureSpec::default()).unwrap();
        prop_assert!((got.value - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }
}
