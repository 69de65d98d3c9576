use crate::error::{DdcError, Result};
use crate::filter::Stages;
use crate::filters::make_lp;
use crate::scalar::Real;

use super::norm::{h2_norm_sq, multirate_norm_sq};

/// Noise rejection of `H` plus a first-order low-pass for both orderings of
/// low-pass filtering and decimation, in dB relative to `||F_LP||^2` of the
/// low-pass alone at the input rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderPoint<T> {
    pub omega_over_omega_s: T,
    /// Low-pass at the input rate, then decimation: `||F_LP H|| / ||F_LP||`.
    pub rejection_after_db: T,
    /// Decimation first, low-pass rebuilt for the decimated period:
    /// `||F~(z^n) H|| / ||F_LP||`.
    pub rejection_before_db: T,
}

impl<T: Real> OrderPoint<T> {
    pub fn difference_db(&self) -> T {
        (self.rejection_before_db - self.rejection_after_db).abs()
    }
}

/// Evaluates both orderings for each bandwidth ratio `omega_lp / omega_s`.
pub fn compare_order<T: Real, S: Stages<T> + ?Sized>(
    h_sys: &S,
    decimation: usize,
    ratios: &[T],
) -> Result<Vec<OrderPoint<T>>> {
    if decimation == 0 {
        return Err(DdcError::usage("decimation factor must be at least 1"));
    }
    let db = |v: T| T::lit(10.0) * v.log10();
    let n = T::from_count(decimation);
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio.is_finite() && ratio > T::zero()) {
                return Err(DdcError::usage("bandwidth ratio must be positive"));
            }
            let x = T::TAU() * ratio;
            let lp = make_lp(x, T::one())?;
            let reference = h2_norm_sq(&lp)?.value;
            let mut after = h_sys.stages().to_vec();
            after.push(lp);
            let after = h2_norm_sq(&after)?.value;
            let before = multirate_norm_sq(h_sys, &make_lp(x, n)?, decimation)?.value;
            Ok(OrderPoint {
                omega_over_omega_s: ratio,
                rejection_after_db: db(after / reference),
                rejection_before_db: db(before / reference),
            })
        })
        .collect()
}

/// `points` ratios spaced evenly in log scale from `lo` to `hi` inclusive.
pub fn log_sweep<T: Real>(lo: T, hi: T, points: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi > lo && hi.is_finite()) || points < 2 {
        return Err(DdcError::usage("sweep needs 0 < lo < hi and at least two points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_count(points - 1);
    Ok((0..points).map(|i| (a + (b - a) * T::from_count(i) / last).exp()).collect())
}
