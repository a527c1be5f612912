use noise_radar::detectors::{compute, declare, DetectorKind, DetectorStatistic};
use noise_radar::signal::{aux_stats, sample_block, AuxStats, MatrixVariant, SignalParams};
use noise_radar::Error;
use proptest::prelude::*;

fn aux(p1: f64, p2: f64, rc: f64, rs: f64) -> AuxStats {
    AuxStats { p1_bar: p1, p2_bar: p2, rc_bar: rc, rs_bar: rs, n: 1 }
}

fn values(a: &AuxStats) -> [f64; 3] {
    DetectorKind::ALL.map(|k| compute(k, a).unwrap().value)
}

#[test]
fn hand_examples() {
    assert_eq!(values(&aux(1.0, 1.0, 1.0, 0.0)), [1.0, 1.0, 1.0]);
    assert_eq!(values(&aux(3.0, 2.0, 0.0, 0.0)), [0.0, 0.0, 0.0]);
    let [d0, rho, mf] = values(&aux(4.0, 1.0, 1.0, 1.0));
    assert_eq!(d0, 1.0);
    assert!((rho - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((mf - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn rhohat_needs_power() {
    let r = compute(DetectorKind::RhoHat, &aux(0.0, 1.0, 0.0, 0.0));
    assert!(matches!(r, Err(Error::Degenerate(_))));
    assert!(compute(DetectorKind::D0, &aux(0.0, 1.0, 0.0, 0.0)).is_ok());
}

#[test]
fn declare_is_strict() {
    let s = |v| DetectorStatistic { kind: DetectorKind::D0, value: v, n: 1 };
    assert!(!declare(&s(0.5), 0.5));
    assert!(declare(&s(0.6), 0.5));
    assert!(!declare(&s(-0.2), 0.0));
}

#[test]
fn names_round_trip() {
    for k in DetectorKind::ALL {
        assert_eq!(k.name().parse::<DetectorKind>().unwrap(), k);
    }
    assert!("nope".parse::<DetectorKind>().is_err());
}

proptest! {
    #[test]
    fn scale_invariance(seed in any::<u64>(), c in 0.01f64..100.0, rho in 0.0f64..0.99) {
        let b = sample_block(&SignalParams::unit(rho).unwrap(), 32, seed).unwrap();
        let a = aux_stats(&b, MatrixVariant::Rotation).unwrap();
        let s = aux_stats(&b.scaled(c), MatrixVariant::Rotation).unwrap();
        let [d0, r, mf] = values(&a);
        let [d0s, rs, mfs] = values(&s);
        prop_assert!((rs - r).abs() <= 1e-12 * r.max(1e-300));
        prop_assert!((d0s - c * c * d0).abs() <= 1e-12 * (c * c * d0).abs().max(1e-300));
        prop_assert!((mfs - c * c * mf).abs() <= 1e-12 * c * c * mf);
    }

    #[test]
    fn mf_is_rhohat_times_power(seed in any::<u64>(), rho in 0.0f64..=1.0, n in 2usize..64) {
        for v in [MatrixVariant::Rotation, MatrixVariant::Reflection] {
            let p = SignalParams::new(0.4, 3.0, rho, 1.0, v).unwrap();
            let a = aux_stats(&sample_block(&p, n, seed).unwrap(), v).unwrap();
            let [_, r, mf] = values(&a);
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert!(mf >= 0.0);
            let want = r * (a.p1_bar * a.p2_bar).sqrt();
            prop_assert!((mf - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }
}
