//! Constructors for the downconversion filters and the passband-to-baseband
//! transform.
//!
//! All baseband constructors return unity gain at zero frequency, so that
//! together with the factor 2 in the mixer a constant envelope comes out with
//! its true scale.

use num_complex::Complex;

use crate::error::{DdcError, Result};
use crate::filter::{ComplexFilter, Domain};
use crate::scalar::Real;
use crate::signal::CarrierConfig;

const SINGULAR_SIN: f64 = 1e-9;

fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

fn sin_delta<T: Real>(carrier: &CarrierConfig<T>) -> Result<T> {
    let s = carrier.grid_phasor(i64::from(carrier.m())).im;
    if s.abs() < T::lit(SINGULAR_SIN) {
        return Err(DdcError::Singular { sin_delta: s.to_f64_lossy() });
    }
    Ok(s)
}

/// `N`-sample moving average, `(1/N)(1 + z^-1 + ... + z^-(N-1))`.
pub fn make_ma<T: Real>(n: usize) -> Result<ComplexFilter<T>> {
    if n == 0 {
        return Err(DdcError::usage("moving average length must be at least 1"));
    }
    let tap = T::one() / T::from_count(n);
    ComplexFilter::fir(vec![cplx(tap); n], Domain::Baseband)
}

/// Two-sample reconstruction,
/// `e^{i*delta} / (2i sin(delta)) * (1 - e^{-2i*delta} z^-1)`.
///
/// The leading phase factor makes the response exactly 1 at zero frequency.
pub fn make_2sr<T: Real>(carrier: &CarrierConfig<T>) -> Result<ComplexFilter<T>> {
    let s = sin_delta(carrier)?;
    let rot = carrier.grid_phasor(i64::from(carrier.m()));
    let b0 = rot / Complex::new(T::zero(), s + s);
    let b1 = -carrier.grid_phasor(-2 * i64::from(carrier.m())) * b0;
    ComplexFilter::fir(vec![b0, b1], Domain::Baseband)
}

/// Two-sample reconstruction without the `e^{i*delta}/i` phase factor,
/// `(1 - e^{-2i*delta} z^-1) / (2 sin(delta))`. Only relative phase is
/// meaningful at its output.
pub fn make_2sr_unnormalized<T: Real>(carrier: &CarrierConfig<T>) -> Result<ComplexFilter<T>> {
    let s = sin_delta(carrier)?;
    let b0 = cplx((s + s).recip());
    let b1 = -carrier.grid_phasor(-2 * i64::from(carrier.m())) * b0;
    ComplexFilter::fir(vec![b0, b1], Domain::Baseband)
}

/// True when `|sin(delta)| < 1/sqrt(2)`, where two-sample reconstruction and
/// DC rejection amplify white noise (`||H_2SR||^2 > 1`).
pub fn amplifies_noise<T: Real>(carrier: &CarrierConfig<T>) -> bool {
    carrier.grid_phasor(i64::from(carrier.m())).im.abs() < T::FRAC_1_SQRT_2()
}

/// Baseband DC-spur rejection,
/// `(1 - e^{-2i*delta} z^-2) / (1 - e^{-2i*delta})`, as three taps with a
/// zero middle tap. Zeros sit at `z = ±e^{-i*delta}`.
pub fn make_dcr<T: Real>(carrier: &CarrierConfig<T>) -> Result<ComplexFilter<T>> {
    sin_delta(carrier)?;
    let w = carrier.grid_phasor(-2 * i64::from(carrier.m()));
    let c = (cplx(T::one()) - w).inv();
    ComplexFilter::fir(vec![c, cplx(T::zero()), -w * c], Domain::Baseband)
}

/// IQ sampling filter `(1 + z^-1)/2`; the carrier must be at `fs/4`.
pub fn make_iq<T: Real>(carrier: &CarrierConfig<T>) -> Result<ComplexFilter<T>> {
    if !carrier.is_iq() {
        return Err(DdcError::usage(format!(
            "IQ sampling requires M/N = 1/4, got {}/{}",
            carrier.m(),
            carrier.n()
        )));
    }
    let half = T::lit(0.5);
    ComplexFilter::fir_real(&[half, half], Domain::Baseband)
}

/// First-order low-pass `(1 - a) / (1 - a z^-1)` with `a = e^{-omega_lp*h}`.
pub fn make_lp<T: Real>(omega_lp: T, h: T) -> Result<ComplexFilter<T>> {
    if !(omega_lp.is_finite() && omega_lp > T::zero()) {
        return Err(DdcError::usage(format!(
            "low-pass bandwidth must be positive, got {omega_lp}"
        )));
    }
    if !(h.is_finite() && h > T::zero()) {
        return Err(DdcError::usage(format!("sample period must be positive, got {h}")));
    }
    let a = (-omega_lp * h).exp();
    ComplexFilter::first_order_iir(cplx(T::one() - a), cplx(a), Domain::Baseband)
}

/// Pre-mixer high-pass `(1 - z^-1) / (1 - p z^-1)` with a real pole in `(0, 1)`.
pub fn make_dc_reject_passband<T: Real>(p: T) -> Result<ComplexFilter<T>> {
    if !(p > T::zero() && p < T::one()) {
        return Err(DdcError::usage(format!("high-pass pole must lie in (0, 1), got {p}")));
    }
    ComplexFilter::pole_zero(vec![cplx(T::one()), cplx(-T::one())], cplx(p), Domain::Passband)
}

/// Pre-mixer DC rejection `(1 - z^-2)/2`, unnormalized. Transforming it to
/// the baseband and normalizing with [`normalize_dc`] yields [`make_dcr`].
pub fn make_dcr_passband<T: Real>() -> ComplexFilter<T> {
    let half = T::lit(0.5);
    ComplexFilter::fir_real(&[half, T::zero(), -half], Domain::Passband)
        .expect("static taps are valid")
}

/// Frequency translation `z -> e^{i*delta} z` of a passband filter:
/// taps `b_m -> b_m e^{-i*delta*m}` and pole `p -> p e^{-i*delta}`, so that
/// `G_bb(e^{i*theta}) = G_pb(e^{i(theta + delta)})`.
pub fn to_baseband<T: Real>(
    filter: &ComplexFilter<T>,
    carrier: &CarrierConfig<T>,
) -> Result<ComplexFilter<T>> {
    if filter.domain() != Domain::Passband {
        return Err(DdcError::usage("filter is already in the baseband"));
    }
    let m = i64::from(carrier.m());
    let taps = filter
        .taps()
        .iter()
        .enumerate()
        .map(|(k, &b)| b * carrier.grid_phasor(-m * k as i64))
        .collect();
    match filter.pole() {
        None => ComplexFilter::fir(taps, Domain::Baseband),
        Some(p) => ComplexFilter::pole_zero(taps, p * carrier.grid_phasor(-m), Domain::Baseband),
    }
}

/// Scales the numerator for exactly unity gain at zero frequency.
pub fn normalize_dc<T: Real>(filter: &ComplexFilter<T>) -> Result<ComplexFilter<T>> {
    let g = filter.dc_gain();
    if g.norm() < T::lit(1e-12) {
        return Err(DdcError::usage("filter has a zero at DC and cannot be normalized"));
    }
    Ok(filter.scaled(g.inv()).with_domain(filter.domain()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::FilterKind;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn carrier(m: u32, n: u32) -> CarrierConfig<f64> {
        CarrierConfig::normalized(m, n).unwrap()
    }

    #[test]
    fn ma_examples() {
        assert_eq!(make_ma::<f64>(1).unwrap().taps(), &[C::new(1.0, 0.0)]);
        let ma11 = make_ma::<f64>(11).unwrap();
        assert_eq!(ma11.taps().len(), 11);
        assert!(ma11.taps().iter().all(|b| (b.re - 0.0909).abs() < 1e-4 && b.im == 0.0));
        let ma4 = make_ma::<f64>(4).unwrap();
        for th in [PI / 2.0, PI, 3.0 * PI / 2.0] {
            // brute-force sum of e^{-i theta m}/4
            let direct: C = (0..4).map(|m| C::from_polar(0.25, -th * m as f64)).sum();
            assert!(direct.norm() < 1e-15);
            assert!(ma4.response(th).norm() < 1e-15);
        }
        assert!(make_ma::<f64>(0).is_err());
    }

    #[test]
    fn two_sample_quarter_rate_is_iq_filter() {
        let f = make_2sr(&carrier(1, 4)).unwrap();
        assert_eq!(f.taps(), &[C::new(0.5, 0.0), C::new(0.5, 0.0)]);
        assert_eq!(f.taps(), make_iq(&carrier(1, 4)).unwrap().taps());
    }

    #[test]
    fn two_sample_notch_and_unity_dc() {
        let c = carrier(2, 17);
        let f = make_2sr(&c).unwrap();
        assert!(f.response(-2.0 * c.delta()).norm() < 1e-15);
        assert!((f.dc_gain() - C::new(1.0, 0.0)).norm() < 1e-15);
        let energy: f64 = f.taps().iter().map(|b| b.norm_sqr()).sum();
        let s = c.delta().sin();
        assert!((energy - 1.0 / (2.0 * s * s)).abs() < 1e-14);
        assert!((energy - 1.102).abs() < 1e-3);
        assert!(amplifies_noise(&c));
        assert!(!amplifies_noise(&carrier(7, 33)));
    }

    #[test]
    fn unnormalized_two_sample_differs_by_phase_factor() {
        let c = carrier(7, 33);
        let f = make_2sr(&c).unwrap();
        let g = make_2sr_unnormalized(&c).unwrap();
        let k = C::from_polar(1.0, c.delta()) / C::new(0.0, 1.0);
        for (a, b) in f.taps().iter().zip(g.taps()) {
            assert!((*a - *b * k).norm() < 1e-15);
        }
    }

    #[test]
    fn dcr_examples() {
        let c = carrier(4, 17);
        let f = make_dcr(&c).unwrap();
        assert!(f.response(-c.delta()).norm() < 1e-15);
        assert!((f.dc_gain() - C::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(f.taps()[1], C::new(0.0, 0.0));
        let q = make_dcr(&carrier(1, 4)).unwrap();
        assert_eq!(q.taps(), &[C::new(0.5, 0.0), C::new(0.0, 0.0), C::new(0.5, 0.0)]);
    }

    #[test]
    fn iq_requires_quarter_rate() {
        let err = make_iq(&carrier(7, 33)).unwrap_err();
        assert!(err.to_string().contains("1/4"));
        let f = make_iq(&carrier(1, 4)).unwrap();
        assert_eq!(f.response(0.0), C::new(1.0, 0.0));
        assert!(f.response(PI).norm() < 1e-16);
    }

    #[test]
    fn lp_examples() {
        let f = make_lp(50.0, 1.0).unwrap();
        assert!(f.pole().unwrap().re < 2e-22);
        let f = make_lp(0.01 * 2.0 * PI, 1.0).unwrap();
        assert!((f.pole().unwrap().re - 0.939101).abs() < 1e-6);
        assert_eq!(f.kind(), FilterKind::FirstOrderIir);
        assert!((f.dc_gain() - C::new(1.0, 0.0)).norm() < 1e-14);
        assert!(make_lp(0.0, 1.0).is_err());
        assert!(make_lp(1.0, -1.0).is_err());
    }

    #[test]
    fn high_pass_examples() {
        let f = make_dc_reject_passband(15.0 / 16.0).unwrap();
        assert_eq!(f.pole(), Some(C::new(0.9375, 0.0)));
        assert_eq!(f.dc_gain(), C::new(0.0, 0.0));
        assert!((f.response(PI) - C::new(2.0 / (1.0 + 0.9375), 0.0)).norm() < 1e-15);
        let out = f.impulse_response(1); // sanity of construction
        assert_eq!(out[0], C::new(1.0, 0.0));
        let mut st = crate::filter::FilterState::new(&f);
        let y = f.process(&mut st, &[C::new(1.0, 0.0); 40]).unwrap();
        for k in 1..40 {
            assert!((y[k].re / y[k - 1].re - 0.9375).abs() < 1e-12);
        }
        assert!(make_dc_reject_passband(1.0).is_err());
        assert!(make_dc_reject_passband(0.0).is_err());
    }

    #[test]
    fn baseband_transform_examples() {
        let c = carrier(7, 33);
        let d = c.delta();
        let bb = to_baseband(&make_dcr_passband(), &c).unwrap();
        assert_eq!(bb.domain(), Domain::Baseband);
        let want = C::from_polar(-0.5, -2.0 * d);
        assert!((bb.taps()[2] - want).norm() < 1e-15);
        assert!((normalize_dc(&bb).unwrap().response(1.0) - make_dcr(&c).unwrap().response(1.0)).norm() < 1e-14);
        assert!(to_baseband(&bb, &c).is_err());

        let id = to_baseband(&ComplexFilter::identity(Domain::Passband), &c).unwrap();
        assert_eq!(id, ComplexFilter::identity(Domain::Baseband));

        let hp = to_baseband(&make_dc_reject_passband(15.0 / 16.0).unwrap(), &c).unwrap();
        assert!((hp.pole().unwrap() - C::from_polar(0.9375, -d)).norm() < 1e-15);
        assert!(hp.response(-d).norm() < 1e-14);
    }
}
