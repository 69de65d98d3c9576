use num_complex::Complex;

use crate::error::{DdcError, Result};
use crate::filter::Stages;
use crate::scalar::Real;
use crate::signal::CarrierConfig;

use super::response::response_at;

/// A baseband frequency on the carrier grid, `theta = 2*pi*bin/N` with
/// `bin` in `(-N/2, N/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasBin<T> {
    pub bin: i64,
    pub theta: T,
}

/// Where a real passband tone at `m * fc` lands after sampling and mixing.
///
/// `Re{a e^{i m delta k}}` mixed by `2 e^{-i delta k}` gives
/// `a e^{i(m-1) delta k} + a* e^{-i(m+1) delta k}`: `plus` carries the
/// amplitude `a`, `minus` its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasPair<T> {
    pub plus: AliasBin<T>,
    pub minus: AliasBin<T>,
}

fn reduce<T: Real>(r: i64, carrier: &CarrierConfig<T>) -> AliasBin<T> {
    let n = i64::from(carrier.n());
    let mut bin = r.rem_euclid(n);
    if 2 * bin > n {
        bin -= n;
    }
    AliasBin { bin, theta: carrier.grid_angle(bin) }
}

pub fn alias_map<T: Real>(order: u32, carrier: &CarrierConfig<T>) -> Result<AliasPair<T>> {
    if order == 0 {
        return Err(DdcError::usage("harmonic order must be at least 1"));
    }
    let m = i64::from(order);
    let step = i64::from(carrier.m());
    Ok(AliasPair { plus: reduce((m - 1) * step, carrier), minus: reduce((-m - 1) * step, carrier) })
}

/// Steady-state contribution at output sample `k` of a passband harmonic
/// `Re{amplitude e^{i order delta k}}` after mixing and filtering by `sys`.
pub fn harmonic_leakage<T: Real, S: Stages<T> + ?Sized>(
    order: u32,
    amplitude: Complex<T>,
    sys: &S,
    carrier: &CarrierConfig<T>,
    k: i64,
) -> Result<Complex<T>> {
    let pair = alias_map(order, carrier)?;
    let at = |b: AliasBin<T>| response_at(sys, b.theta) * carrier.grid_phasor(b.bin * k);
    Ok(amplitude * at(pair.plus) + amplitude.conj() * at(pair.minus))
}
