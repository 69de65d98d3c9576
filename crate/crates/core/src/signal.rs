//! Carrier configuration and sampled sequences.

use num_complex::Complex;

use crate::error::{DdcError, Result};
use crate::scalar::{gcd, Real};

/// Non-IQ sampling configuration: `n` samples are taken over `m` carrier
/// periods at sample rate `fs`.
///
/// The per-sample phase advance `delta = 2*pi*m/n` is always derived from the
/// integer ratio, so filter zeros placed at multiples of `2*pi/n` line up with
/// the carrier harmonics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig<T> {
    m: u32,
    n: u32,
    fs: T,
}

impl<T: Real> CarrierConfig<T> {
    /// Requires `0 < m` and `2m < n` (carrier below Nyquist) and a finite,
    /// strictly positive `fs`.
    pub fn new(m: u32, n: u32, fs: T) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(DdcError::InvalidCarrier(format!(
                "M and N must be positive, got {m}/{n}"
            )));
        }
        if 2 * u64::from(m) >= u64::from(n) {
            return Err(DdcError::InvalidCarrier(format!(
                "M/N = {m}/{n} is not below 1/2"
            )));
        }
        if !(fs.is_finite() && fs > T::zero()) {
            return Err(DdcError::InvalidCarrier(format!(
                "sample rate must be positive and finite, got {fs}"
            )));
        }
        Ok(Self { m, n, fs })
    }

    /// Carrier with a unit sample rate, for purely normalized work.
    pub fn normalized(m: u32, n: u32) -> Result<Self> {
        Self::new(m, n, T::one())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn fs(&self) -> T {
        self.fs
    }

    /// Sample period `h = 1/fs`.
    pub fn h(&self) -> T {
        self.fs.recip()
    }

    /// Carrier frequency in Hz, `fs*m/n`.
    pub fn fc(&self) -> T {
        self.fs * T::from(self.m).unwrap() / T::from(self.n).unwrap()
    }

    /// Carrier angular frequency in rad/s.
    pub fn omega_c(&self) -> T {
        self.delta() * self.fs
    }

    /// Phase advance per sample, `2*pi*m/n`.
    pub fn delta(&self) -> T {
        self.grid_angle(i64::from(self.m))
    }

    /// Angle `2*pi*r/n` for an integer grid index `r`.
    pub fn grid_angle(&self, r: i64) -> T {
        T::TAU() * T::from(r).unwrap() / T::from(self.n).unwrap()
    }

    /// `gcd(m, n) == 1`; required for the full harmonic-rejection properties.
    pub fn is_coprime(&self) -> bool {
        gcd(u64::from(self.m), u64::from(self.n)) == 1
    }

    /// IQ sampling: the reduced ratio is exactly 1/4.
    pub fn is_iq(&self) -> bool {
        4 * u64::from(self.m) == u64::from(self.n)
    }

    /// Carrier phase index `(m*k) mod n` at absolute sample `k`.
    pub fn phase_index(&self, k: i64) -> u64 {
        let n = u64::from(self.n);
        let kr = k.rem_euclid(i64::from(self.n)) as u64;
        (kr * u64::from(self.m)) % n
    }

    /// `e^{i*delta*k}`, evaluated from the reduced phase index so that it is
    /// reproducible for any `k`.
    pub fn phasor(&self, k: i64) -> Complex<T> {
        grid_phasor(self.phase_index(k) as i64, u64::from(self.n))
    }

    /// `e^{2*pi*i*r/n}` on this carrier's grid.
    pub fn grid_phasor(&self, r: i64) -> Complex<T> {
        grid_phasor(r, u64::from(self.n))
    }
}

/// `e^{2*pi*i*r/n}` with quadrant reduction: the angle is folded into
/// `[0, pi/2)` and rotated back by an exact power of `i`, so quarter-turn
/// points (`4r ≡ 0 mod n`) come out exactly as `±1` or `±i`.
pub fn grid_phasor<T: Real>(r: i64, n: u64) -> Complex<T> {
    assert!(n > 0, "grid size must be positive");
    let r = (r.rem_euclid(n as i64)) as u64;
    let quarter = (4 * u128::from(r) / u128::from(n)) as u64;
    let rest = 4 * u128::from(r) - u128::from(quarter) * u128::from(n);
    let alpha = T::FRAC_PI_2() * T::from(rest).unwrap() / T::from(n).unwrap();
    let (s, c) = alpha.sin_cos();
    match quarter {
        0 => Complex::new(c, s),
        1 => Complex::new(-s, c),
        2 => Complex::new(-c, -s),
        _ => Complex::new(s, -c),
    }
}

/// Complex samples with the absolute index of the first sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexSeq<T> {
    pub start: i64,
    samples: Vec<Complex<T>>,
}

/// Real samples with the absolute index of the first sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealSeq<T> {
    pub start: i64,
    samples: Vec<T>,
}

impl<T: Real> ComplexSeq<T> {
    /// Rejects NaN or infinite samples.
    pub fn new(start: i64, samples: Vec<Complex<T>>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(DdcError::NonFinite(start + i as i64));
        }
        Ok(Self { start, samples })
    }

    pub(crate) fn from_trusted(start: i64, samples: Vec<Complex<T>>) -> Self {
        Self { start, samples }
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Absolute index of the last sample plus one.
    pub fn end(&self) -> i64 {
        self.start + self.samples.len() as i64
    }
}

impl<T: Real> RealSeq<T> {
    pub fn new(start: i64, samples: Vec<T>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(DdcError::NonFinite(start + i as i64));
        }
        Ok(Self { start, samples })
    }

    pub(crate) fn from_trusted(start: i64, samples: Vec<T>) -> Self {
        Self { start, samples }
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_complex(&self) -> ComplexSeq<T> {
        ComplexSeq::from_trusted(
            self.start,
            self.samples.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }
}

/// Keeps every `factor`-th sample: the samples whose absolute index `k`
/// satisfies `k ≡ phase (mod factor)`.
///
/// The output start index is expressed on the low-rate time axis,
/// `(k_first - phase) / factor`. For a sequence starting at index 0 this is
/// `output[j] = x[phase + j*factor]`.
pub fn decimate<T: Real>(x: &ComplexSeq<T>, factor: usize, phase: usize) -> Result<ComplexSeq<T>> {
    if factor == 0 {
        return Err(DdcError::usage("decimation factor must be at least 1"));
    }
    if phase >= factor {
        return Err(DdcError::usage(format!(
            "decimation phase {phase} is outside [0, {factor})"
        )));
    }
    let f = factor as i64;
    let p = phase as i64;
    let offset = (p - x.start).rem_euclid(f);
    let first = x.start + offset;
    let samples = x.samples.iter().skip(offset as usize).step_by(factor).copied().collect();
    Ok(ComplexSeq::from_trusted((first - p).div_euclid(f), samples))
}
