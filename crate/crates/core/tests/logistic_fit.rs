use noise_radar::analytic::{required_nrho2, SmallRhoFamily};
use noise_radar::logistic::{
    fit_logistic, ise_objective, logistic_eval, logistic_inverse, reproduce_tables, upper_limit, write_table_csv,
    FitObjectiveSpec, IseObjective, LogisticFit,
};
use noise_radar_oracles as oracle;
use proptest::prelude::*;

fn marcum_1e6() -> LogisticFit {
    LogisticFit::new(SmallRhoFamily::Marcum, 1e-6, 16.2928, 0.275043).unwrap()
}

/// Mean square error by adaptive Simpson directly in `x`.
fn ise_oracle(family: SmallRhoFamily, pfa: f64, s: f64, k: f64) -> f64 {
    let l = upper_limit(pfa);
    let g = |x: f64| {
        let r = family.pd(pfa, x).unwrap() - 1.0 / (1.0 + s * (-k * x).exp()).powi(2);
        r * r
    };
    // fine pieces near the origin, where the target rises like √x
    let mut edges: Vec<f64> = (0..=400).map(|i| l * (i as f64 / 400.0).powi(2)).collect();
    edges.dedup();
    oracle::simpson_pieces(&g, &edges, 1e-13) / l
}

#[test]
fn eval_examples() {
    let f = marcum_1e6();
    assert!((logistic_eval(&f, 1e4).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(logistic_eval(&f, 0.0).unwrap(), 1.0 / (1.0f64 + 16.2928).powi(2));
    let std = LogisticFit { s: 1.0, k: 1.0, d: 1.0, ..f };
    assert_eq!(logistic_eval(&std, 0.0).unwrap(), 0.5);
    assert!(LogisticFit::new(SmallRhoFamily::D0, 0.1, -1.0, 0.3).is_err());
    assert!(LogisticFit::new(SmallRhoFamily::D0, 0.1, 1.0, 0.0).is_err());
}

#[test]
fn inverse_examples() {
    let f = marcum_1e6();
    for y in [0.1, 0.5, 0.95] {
        let x = logistic_inverse(&f, y).unwrap();
        assert!((logistic_eval(&f, x).unwrap() / y - 1.0).abs() < 1e-10);
    }
    let y0 = 1.0 / (1.0f64 + 16.2928).powi(2);
    assert!(logistic_inverse(&f, y0).unwrap().abs() < 1e-12);
    for bad in [0.0, 1.0, 1.5, -0.1] {
        assert!(logistic_inverse(&f, bad).is_err());
    }
    // the fitted curve gives a usable estimate of the required Nρ²
    let approx = logistic_inverse(&f, 0.95).unwrap();
    let exact = required_nrho2(0.95, 1e-6, SmallRhoFamily::Marcum).unwrap();
    assert!((approx - exact).abs() <= 1.5, "{approx} vs {exact}");
}

#[test]
fn objective_matches_simpson() {
    for (fam, pfa, s, k) in [
        (SmallRhoFamily::Marcum, 1e-2, 3.13574, 0.480237),
        (SmallRhoFamily::D0, 1e-2, 2.29804, 0.603857),
        (SmallRhoFamily::Marcum, 1e-8, 28.7084, 0.236497),
        (SmallRhoFamily::D0, 1e-9, 5.0, 0.5),
    ] {
        let spec = FitObjectiveSpec::new(fam, pfa).unwrap();
        let got = ise_objective(&spec, s, k).unwrap();
        let want = ise_oracle(fam, pfa, s, k);
        assert!((got / want - 1.0).abs() < 1e-7, "{fam} {pfa}: {got} vs {want}");
    }
}

#[test]
fn objective_at_tabulated_parameters() {
    let m = ise_objective(&FitObjectiveSpec::new(SmallRhoFamily::Marcum, 1e-2).unwrap(), 3.13574, 0.480237).unwrap();
    assert!((m / 15.2444e-5 - 1.0).abs() <= 0.1, "{m}");
    let d = ise_objective(&FitObjectiveSpec::new(SmallRhoFamily::D0, 1e-2).unwrap(), 2.29804, 0.603857).unwrap();
    assert!((d / 19.0271e-5 - 1.0).abs() <= 0.1, "{d}");
}

#[test]
fn self_fit_is_exact() {
    let obj =
        IseObjective::with_target(upper_limit(1e-4), 256, 1e-10, |x| Ok(1.0 / (1.0 + 6.0 * (-0.38 * x).exp()).powi(2)))
            .unwrap();
    assert!(obj.evaluate(6.0, 0.38).unwrap().abs() <= 1e-12);
    assert!(obj.evaluate(6.0, 0.39).unwrap() > 0.0);
    assert!(obj.evaluate(-1.0, 0.39).is_err());
}

#[test]
fn spec_limits() {
    let s = FitObjectiveSpec::new(SmallRhoFamily::D0, 1e-4).unwrap();
    assert_eq!(s.upper, 27.0);
    assert!(s.min_nodes >= 256);
    assert!(FitObjectiveSpec::new(SmallRhoFamily::D0, 1.0).is_err());
}

#[test]
fn single_fits() {
    let m = fit_logistic(&FitObjectiveSpec::new(SmallRhoFamily::Marcum, 1e-6).unwrap()).unwrap();
    assert!((m.s / 16.2928 - 1.0).abs() <= 0.05 && (m.k / 0.275043 - 1.0).abs() <= 0.05, "{m:?}");
    let d = fit_logistic(&FitObjectiveSpec::new(SmallRhoFamily::D0, 1e-4).unwrap()).unwrap();
    assert!((d.s / 6.16081 - 1.0).abs() <= 0.05 && (d.k / 0.385126 - 1.0).abs() <= 0.05, "{d:?}");
    assert_eq!((m.a, m.d), (1.0, 2.0));
}

#[test]
fn table_rows() {
    let rows = reproduce_tables().unwrap();
    assert_eq!(rows.len(), 20);
    for fam in [SmallRhoFamily::D0, SmallRhoFamily::Marcum] {
        let r: Vec<_> = rows.iter().filter(|r| r.family == fam).collect();
        assert_eq!(r.len(), 10);
        for w in r.windows(2) {
            assert!(w[1].pfa < w[0].pfa);
            assert!(w[1].s > w[0].s && w[1].k < w[0].k, "{fam}: {:?} -> {:?}", w[0], w[1]);
        }
    }
    for r in &rows {
        assert!(r.epsilon >= 0.0 && r.epsilon <= 2e-4, "{r:?}");
        let l = upper_limit(r.pfa);
        let worst = (0..=3000)
            .map(|i| {
                let x = l * i as f64 / 3000.0;
                (r.family.pd(r.pfa, x).unwrap() - logistic_eval(r, x).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        // at large pfa the sigmoid cannot follow the √x onset at the origin
        let bound = if r.pfa <= 1e-4 { 0.03 } else { 0.16 };
        assert!(worst <= bound, "{r:?}: sup error {worst}");
    }

    let mut buf = Vec::new();
    write_table_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("family,pfa,S,k,epsilon"));
    assert_eq!(text.lines().count(), 21);
    let json = serde_json::to_string(&rows).unwrap();
    let back: Vec<LogisticFit> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rows);
}

proptest! {
    #[test]
    fn inverse_round_trip(y in 0.001f64..0.999, s in 0.5f64..100.0, k in 0.05f64..2.0) {
        let f = LogisticFit::new(SmallRhoFamily::Marcum, 1e-3, s, k).unwrap();
        let x = logistic_inverse(&f, y).unwrap();
        // below y(0) the inverse is negative and outside the curve's domain
        if x >= 0.0 {
            let back = logistic_eval(&f, x).unwrap();
            prop_assert!((back / y - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn eval_increasing(x in 0.0f64..100.0, dx in 1e-6f64..10.0, s in 0.5f64..100.0, k in 0.05f64..2.0) {
        let f = LogisticFit::new(SmallRhoFamily::D0, 1e-3, s, k).unwrap();
        let a = logistic_eval(&f, x).unwrap();
        let b = logistic_eval(&f, x + dx).unwrap();
        prop_assert!(b >= a && a > 0.0 && b <= 1.0);
    }

    #[test]
    fn objective_nonnegative(s in 0.5f64..100.0, k in 0.05f64..2.0) {
        let spec = FitObjectiveSpec::new(SmallRhoFamily::Marcum, 1e-3).unwrap();
        prop_assert!(ise_objective(&spec, s, k).unwrap() > 0.0);
    }
}
