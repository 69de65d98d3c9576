use num_complex::Complex;

use crate::error::{DdcError, Result};
use crate::filter::Stages;
use crate::scalar::{gcd, wrap_angle, Real};

/// Normalized angular frequencies in `(-pi, pi]`, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid<T> {
    thetas: Vec<T>,
}

impl<T: Real> FreqGrid<T> {
    pub fn new(thetas: Vec<T>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(DdcError::usage("frequency grid is empty"));
        }
        if thetas.iter().any(|&t| !(t > -T::PI() && t <= T::PI())) {
            return Err(DdcError::usage("grid frequencies must lie in (-pi, pi]"));
        }
        if thetas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(DdcError::usage("grid frequencies must be strictly increasing"));
        }
        Ok(Self { thetas })
    }

    /// `n` points `theta_j = pi*(2(j+1) - n)/n`, ending at `pi`. For even `n`
    /// the grid contains `theta = 0`, and when `n` is a multiple of `2N` it
    /// contains every carrier grid point `2*pi*r/N` exactly as
    /// [`CarrierConfig::grid_angle`](crate::CarrierConfig::grid_angle)
    /// computes it.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DdcError::usage("frequency grid needs at least one point"));
        }
        let den = 2 * n as i64;
        let thetas = (0..n as i64)
            .map(|j| {
                let num = 2 * (j + 1) - n as i64;
                let g = gcd(num.unsigned_abs(), den as u64).max(1) as i64;
                T::TAU() * T::from(num / g).unwrap() / T::from(den / g).unwrap()
            })
            .collect();
        Ok(Self { thetas })
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Grid frequencies in Hz for sample rate `fs`.
    pub fn hz(&self, fs: T) -> Vec<T> {
        self.thetas.iter().map(|&t| t / T::TAU() * fs).collect()
    }
}

/// Response of a filter or cascade at a single normalized frequency.
pub fn response_at<T: Real, S: Stages<T> + ?Sized>(sys: &S, theta: T) -> Complex<T> {
    sys.stages()
        .iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, s| acc * s.response(theta))
}

/// Evaluates `G(e^{i*theta})` on every grid point. Complex-coefficient
/// filters are not conjugate symmetric, so the full `(-pi, pi]` range matters.
pub fn freq_response<T: Real, S: Stages<T> + ?Sized>(sys: &S, grid: &FreqGrid<T>) -> Vec<Complex<T>> {
    grid.thetas.iter().map(|&t| response_at(sys, t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMetrics<T> {
    /// Unwrapped phase in radians, continuous from zero frequency.
    pub phase: T,
    /// `-d(arg G)/d(omega)` in seconds.
    pub group_delay: T,
}

const UNWRAP_STEP: f64 = 0.01;
const FD_STEP: f64 = 1e-6;
const MIN_MAGNITUDE: f64 = 1e-9;

/// Phase and group delay at angular frequency `omega` (rad/s) for sample
/// period `h`.
///
/// The phase is unwrapped along a path from `theta = 0`; the group delay is a
/// central difference with step `1e-6/h` in `omega`.
pub fn phase_metrics<T: Real, S: Stages<T> + ?Sized>(sys: &S, omega: T, h: T) -> Result<PhaseMetrics<T>> {
    if !(h.is_finite() && h > T::zero()) || !omega.is_finite() {
        return Err(DdcError::usage("phase metrics need a finite frequency and positive period"));
    }
    let theta = omega * h;
    let g = response_at(sys, theta);
    if g.norm() < T::lit(MIN_MAGNITUDE) {
        return Err(DdcError::ResponseZero { theta: theta.to_f64_lossy(), magnitude: g.norm().to_f64_lossy() });
    }

    let steps = (theta.abs() / T::lit(UNWRAP_STEP)).ceil().to_usize().unwrap_or(0).max(1);
    let mut prev = response_at(sys, T::zero());
    let mut phase = prev.arg();
    for i in 1..=steps {
        let t = theta * T::from_count(i) / T::from_count(steps);
        let cur = response_at(sys, t);
        phase += wrap_angle((cur / prev).arg());
        prev = cur;
    }

    let d = T::lit(FD_STEP);
    let ratio = response_at(sys, theta + d) / response_at(sys, theta - d);
    let tau_samples = -ratio.arg() / (d + d);
    Ok(PhaseMetrics { phase, group_delay: tau_samples * h })
}
