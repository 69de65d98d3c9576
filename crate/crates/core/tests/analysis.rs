use std::f64::consts::{PI, TAU};

use ddc_core::analysis::{h2_norm_sq, multirate_norm_sq, multirate_response, response_at, NormMethod};
use ddc_core::filters::{make_2sr, make_dc_reject_passband, make_dcr, make_iq, make_lp, make_ma, to_baseband};
use ddc_core::{Carrier, ComplexFilter, Domain, Filter, C64};
use proptest::prelude::*;

/// `(1/2pi) * integral |G|^2` by the trapezoidal rule on a periodic grid.
fn parseval(stages: &[Filter], n: usize, decimated: Option<(&Filter, usize)>) -> f64 {
    let sum: f64 = (0..n)
        .map(|j| {
            let theta = -PI + TAU * j as f64 / n as f64;
            match decimated {
                None => response_at(stages, theta).norm_sqr(),
                Some((f, d)) => multirate_response(stages, f, d, theta).norm_sqr(),
            }
        })
        .sum();
    sum / n as f64
}

fn constructed() -> Vec<(String, Vec<Filter>)> {
    let c = Carrier::normalized(7, 33).unwrap();
    let c417 = Carrier::normalized(4, 17).unwrap();
    let q = Carrier::normalized(1, 4).unwrap();
    let lp = make_lp(TAU * 0.01, 1.0).unwrap();
    let hp = to_baseband(&make_dc_reject_passband(15.0 / 16.0).unwrap(), &c).unwrap();
    vec![
        ("MA(11)".into(), vec![make_ma(11).unwrap()]),
        ("MA(33)".into(), vec![make_ma(33).unwrap()]),
        ("2SR".into(), vec![make_2sr(&c).unwrap()]),
        ("DCR".into(), vec![make_dcr(&c417).unwrap()]),
        ("IQ".into(), vec![make_iq(&q).unwrap()]),
        ("LP".into(), vec![lp.clone()]),
        ("HP".into(), vec![hp.clone()]),
        ("2SR*LP".into(), vec![make_2sr(&c).unwrap(), lp.clone()]),
        ("HP*2SR*LP".into(), vec![hp, make_2sr(&c).unwrap(), lp]),
    ]
}

#[test]
fn parseval_consistency() {
    for (name, stages) in constructed() {
        let norm = h2_norm_sq(&stages).unwrap();
        assert!(!norm.is_degraded(), "{name}");
        let integral = parseval(&stages, 1 << 16, None);
        let rel = (norm.value - integral).abs() / norm.value;
        assert!(rel < 1e-6, "{name}: {} vs {integral} ({rel:e})", norm.value);
    }
}

#[test]
fn multi_pole_cascade_uses_impulse_sum() {
    let c = Carrier::normalized(7, 33).unwrap();
    let hp = to_baseband(&make_dc_reject_passband(15.0 / 16.0).unwrap(), &c).unwrap();
    let r = h2_norm_sq(&vec![hp, make_lp(0.1, 1.0).unwrap()]).unwrap();
    assert!(matches!(r.method, NormMethod::ImpulseSum { .. }));
    assert_eq!(r.method_name(), "impulse-sum");
}

#[test]
fn multirate_parseval() {
    let ma = make_ma(14).unwrap();
    for x in [0.01, 0.3, 3.0] {
        let f = make_lp(x, 14.0).unwrap();
        let norm = multirate_norm_sq(&ma, &f, 14).unwrap().value;
        let integral = parseval(std::slice::from_ref(&ma), 1 << 16, Some((&f, 14)));
        assert!((norm - integral).abs() < 1e-6 * norm, "{x}: {norm} vs {integral}");
    }
}

#[test]
fn multirate_identity_lowpass_reduces_to_single_rate() {
    let c = Carrier::normalized(7, 33).unwrap();
    let two = make_2sr(&c).unwrap();
    let id = ComplexFilter::identity(Domain::Baseband);
    for n in [1, 2, 14] {
        let a = multirate_norm_sq(&two, &id, n).unwrap().value;
        let b = h2_norm_sq(&two).unwrap().value;
        assert!((a - b).abs() < 1e-15 * b);
    }
    // a genuine low-pass at the decimated rate differs from the same filter at the input rate
    let f = make_lp(0.5f64, 1.0).unwrap();
    let multi = multirate_norm_sq(&make_ma(14).unwrap(), &f, 14).unwrap().value;
    let single = h2_norm_sq(&vec![make_ma(14).unwrap(), f]).unwrap().value;
    assert!((multi - single).abs() > 1e-3 * single);
}

#[test]
fn norm_increases_with_bandwidth() {
    for (name, stages) in constructed() {
        let mut prev = 0.0;
        for i in 0..50 {
            let x = 1e-5 * 10f64.powf(5.0 * i as f64 / 49.0);
            let mut s = stages.clone();
            s.push(make_lp(x, 1.0).unwrap());
            let v = h2_norm_sq(&s).unwrap().value;
            assert!(v > prev, "{name} at {x}");
            prev = v;
        }
    }
}

#[test]
fn small_bandwidth_asymptote() {
    let c = Carrier::normalized(7, 33).unwrap();
    for h in [make_ma(11).unwrap(), make_ma(33).unwrap(), make_2sr(&c).unwrap(), make_dcr(&c).unwrap()] {
        let v = h2_norm_sq(&vec![h, make_lp(1e-4, 1.0).unwrap()]).unwrap().value;
        assert!((v / 0.5e-4 - 1.0).abs() < 0.01, "{v}");
    }
    // omega_lp / omega_s = 0.01 gives about -15 dB
    let v = h2_norm_sq(&make_lp(TAU * 0.01, 1.0).unwrap()).unwrap().value_db();
    assert!((v - -15.0).abs() < 0.1, "{v}");
}

proptest! {
    #[test]
    fn norm_product_bound(
        taps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
        pr in 0.0f64..0.95, pa in -PI..PI,
        ftaps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
    ) {
        let h = ComplexFilter::pole_zero(
            taps.iter().map(|&(a, b)| C64::new(a, b)).collect(),
            C64::from_polar(pr, pa),
            Domain::Baseband,
        ).unwrap();
        let f = ComplexFilter::fir(ftaps.iter().map(|&(a, b)| C64::new(a, b)).collect(), Domain::Baseband).unwrap();
        let sup = (0..4096)
            .map(|j| f.response(-PI + TAU * j as f64 / 4096.0).norm_sqr())
            .fold(0.0, f64::max);
        // the grid maximum of a short FIR is within a tiny margin of the supremum
        let bound = h2_norm_sq(&h).unwrap().value * sup * (1.0 + 1e-3);
        let both = h2_norm_sq(&vec![h, f]).unwrap().value;
        prop_assert!(both <= bound, "{} > {}", both, bound);
    }
}
