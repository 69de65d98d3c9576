use crate::error::{DdcError, Result};
use crate::filter::{ComplexFilter, Stages};
use crate::filters::make_lp;
use crate::scalar::Real;

use super::norm::{h2_norm_sq, NormReport};

/// Bracket on `omega_lp * h`: below it the low-pass passes almost nothing, above
/// it the pole is numerically zero.
const BRACKET: (f64, f64) = (1e-9, 50.0);
const MAX_ITERS: usize = 400;
const RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedLowpass<T> {
    /// Bandwidth in rad/s.
    pub omega_lp: T,
    /// Dimensionless `omega_lp * h`.
    pub omega_lp_h: T,
    /// Achieved `||H F_LP||^2`.
    pub norm: NormReport<T>,
}

impl<T: Real> TunedLowpass<T> {
    /// Bandwidth relative to the angular sample rate, `omega_lp / omega_s`.
    pub fn omega_over_omega_s(&self) -> T {
        self.omega_lp_h / T::TAU()
    }
}

fn cascade_norm<T: Real>(h: &[ComplexFilter<T>], x: T) -> Result<NormReport<T>> {
    let mut stages = h.to_vec();
    stages.push(make_lp(x, T::one())?);
    h2_norm_sq(&stages)
}

/// Finds the first-order low-pass bandwidth for which
/// `||H F_LP||^2 = 10^(target_db/10)`.
///
/// Bisection on `ln(omega_lp h)`; the norm increases monotonically with the
/// bandwidth.
pub fn tune_lp_bandwidth<T: Real, S: Stages<T> + ?Sized>(h_sys: &S, target_db: T, h: T) -> Result<TunedLowpass<T>> {
    if !(h.is_finite() && h > T::zero()) {
        return Err(DdcError::usage("sample period must be positive"));
    }
    if !target_db.is_finite() {
        return Err(DdcError::usage("target must be finite"));
    }
    let stages = h_sys.stages();
    let target = T::lit(10.0).powf(target_db / T::lit(10.0));
    let ceiling = h2_norm_sq(stages)?.value;
    let (lo0, hi0) = (T::lit(BRACKET.0), T::lit(BRACKET.1));
    let floor = cascade_norm(stages, lo0)?.value;
    let db = |v: T| (T::lit(10.0) * v.log10()).to_f64_lossy();
    if !(target < ceiling && target > floor) {
        return Err(DdcError::Unachievable {
            target_db: target_db.to_f64_lossy(),
            min_db: db(floor),
            max_db: db(ceiling),
        });
    }

    let (mut lo, mut hi) = (lo0.ln(), hi0.ln());
    let mut best = (hi0, cascade_norm(stages, hi0)?);
    if best.1.value <= target {
        return Ok(TunedLowpass { omega_lp: hi0 / h, omega_lp_h: hi0, norm: best.1 });
    }
    for _ in 0..MAX_ITERS {
        let mid = T::lit(0.5) * (lo + hi);
        let x = mid.exp();
        let n = cascade_norm(stages, x)?;
        if (n.value / target - T::one()).abs() < (best.1.value / target - T::one()).abs() {
            best = (x, n);
        }
        if (n.value / target - T::one()).abs() < T::lit(RTOL) {
            break;
        }
        if n.value < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi.abs().max(T::one()) {
            break;
        }
    }
    let (x, norm) = best;
    Ok(TunedLowpass { omega_lp: x / h, omega_lp_h: x, norm })
}
