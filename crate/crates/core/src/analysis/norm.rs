//! Squared H2 norms (impulse-response energy) of cascades, including the
//! multirate form `||F(z^N) H(z)||^2` that describes filtering after an
//! `N`-fold decimator.

use num_complex::Complex;

use crate::error::{DdcError, Result};
use crate::filter::{convolve, ComplexFilter, Stages};
use crate::scalar::Real;

/// Relative precision at which a truncated impulse sum stops.
const TAIL_RTOL: f64 = 1e-14;
/// A tail bound above this fraction of the value marks the result degraded.
const DEGRADED_RTOL: f64 = 1e-10;
const MAX_IMPULSE_SAMPLES: usize = 1 << 27;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormMethod<T> {
    ClosedForm,
    /// Truncated impulse-response energy; `tail_bound` estimates the energy
    /// beyond the last summed sample.
    ImpulseSum { tail_bound: T, samples: usize },
    MonteCarlo { stderr: T },
}

/// Noise gain `||G||_2^2`: the output variance for unit-variance white input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport<T> {
    pub value: T,
    pub method: NormMethod<T>,
}

impl<T: Real> NormReport<T> {
    pub fn value_db(&self) -> T {
        T::lit(10.0) * self.value.log10()
    }

    pub fn is_degraded(&self) -> bool {
        match self.method {
            NormMethod::ImpulseSum { tail_bound, .. } => tail_bound >= T::lit(DEGRADED_RTOL) * self.value,
            _ => false,
        }
    }

    pub fn method_name(&self) -> &'static str {
        match self.method {
            NormMethod::ClosedForm => "closed-form",
            NormMethod::ImpulseSum { .. } => "impulse-sum",
            NormMethod::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Numerator polynomial over a product of strided first-order sections
/// `1 / (1 - p z^-d)`.
#[derive(Debug, Clone)]
pub(crate) struct Rational<T> {
    taps: Vec<Complex<T>>,
    poles: Vec<(Complex<T>, usize)>,
}

impl<T: Real> Rational<T> {
    pub(crate) fn from_stages(stages: &[ComplexFilter<T>]) -> Self {
        let mut r = Self { taps: vec![Complex::new(T::one(), T::zero())], poles: Vec::new() };
        for s in stages {
            r.push(s, 1);
        }
        r
    }

    /// Appends `f(z^stride)`.
    pub(crate) fn push(&mut self, f: &ComplexFilter<T>, stride: usize) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut up = vec![zero; (f.taps().len() - 1) * stride + 1];
        for (m, &b) in f.taps().iter().enumerate() {
            up[m * stride] = b;
        }
        self.taps = convolve(&self.taps, &up);
        if let Some(p) = f.pole() {
            self.poles.push((p, stride));
        }
    }

    fn check_stable(&self) -> Result<()> {
        for &(p, _) in &self.poles {
            let r = p.norm();
            if !(r < T::one()) {
                return Err(DdcError::Unstable(r.to_f64_lossy()));
            }
        }
        Ok(())
    }

    pub(crate) fn impulse(&self) -> ImpulseGen<'_, T> {
        ImpulseGen {
            taps: &self.taps,
            sections: self
                .poles
                .iter()
                .map(|&(p, d)| (p, vec![Complex::new(T::zero(), T::zero()); d], 0))
                .collect(),
            k: 0,
        }
    }

    pub(crate) fn energy(&self) -> Result<NormReport<T>> {
        self.check_stable()?;
        match self.poles.as_slice() {
            [] => Ok(NormReport {
                value: self.taps.iter().fold(T::zero(), |a, b| a + b.norm_sqr()),
                method: NormMethod::ClosedForm,
            }),
            &[(p, d)] => Ok(NormReport { value: self.single_pole_energy(p, d), method: NormMethod::ClosedForm }),
            _ => Ok(self.impulse_sum()),
        }
    }

    /// With one section of stride `d`, the impulse response obeys
    /// `g[k] = p g[k-d]` for every `k >= L` (numerator length `L`), so the
    /// block `[L-d, L)` repeats geometrically and the tail sums exactly.
    fn single_pole_energy(&self, p: Complex<T>, d: usize) -> T {
        let len = self.taps.len();
        let g: Vec<Complex<T>> = self.impulse().take(len).collect();
        let split = len.saturating_sub(d);
        let head = g[..split].iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        let block = g[split..].iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        head + block / (T::one() - p.norm_sqr())
    }

    fn impulse_sum(&self) -> NormReport<T> {
        // slowest per-sample decay over all sections
        let rho = self
            .poles
            .iter()
            .map(|&(p, d)| p.norm().powf(T::from_count(d).recip()))
            .fold(T::zero(), T::max);
        let window = self.poles.iter().map(|&(_, d)| d).max().unwrap_or(1);
        let order = self.poles.len();
        let warmup = self.taps.len() + self.poles.iter().map(|&(_, d)| d).sum::<usize>();
        let decay = rho.powi(2 * window as i32);

        let mut acc = T::zero();
        let mut recent = vec![T::zero(); window];
        let mut tail = T::infinity();
        let mut k = 0usize;
        for g in self.impulse() {
            let e = g.norm_sqr();
            acc += e;
            recent[k % window] = e;
            k += 1;
            if k >= 4 * warmup && k.is_multiple_of(window) {
                let ew = recent.iter().fold(T::zero(), |a, &b| a + b);
                // polynomial growth factor for repeated-modulus modes
                let kk = T::from_count(k);
                let growth = ((kk + T::from_count(window)) / kk).powi(2 * (order as i32 - 1));
                let ratio = decay * growth;
                if ratio < T::one() {
                    tail = ew * ratio / (T::one() - ratio);
                    if tail <= T::lit(TAIL_RTOL) * acc {
                        break;
                    }
                }
            }
            if k >= MAX_IMPULSE_SAMPLES {
                break;
            }
        }
        NormReport { value: acc + tail.min(acc), method: NormMethod::ImpulseSum { tail_bound: tail, samples: k } }
    }

    pub(crate) fn response(&self, theta: T) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let num = self
            .taps
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (m, &b)| {
                acc + b * Complex::from_polar(T::one(), -theta * T::from_count(m))
            });
        self.poles.iter().fold(num, |acc, &(p, d)| {
            acc / (one - p * Complex::from_polar(T::one(), -theta * T::from_count(d)))
        })
    }
}

/// Streams the impulse response of a [`Rational`].
pub(crate) struct ImpulseGen<'a, T> {
    taps: &'a [Complex<T>],
    sections: Vec<(Complex<T>, Vec<Complex<T>>, usize)>,
    k: usize,
}

impl<T: Real> Iterator for ImpulseGen<'_, T> {
    type Item = Complex<T>;

    fn next(&mut self) -> Option<Complex<T>> {
        let mut x = self.taps.get(self.k).copied().unwrap_or(Complex::new(T::zero(), T::zero()));
        for (p, ring, pos) in &mut self.sections {
            // ring[pos] holds y[k - d]
            let y = x + *p * ring[*pos];
            ring[*pos] = y;
            *pos = (*pos + 1) % ring.len();
            x = y;
        }
        self.k += 1;
        Some(x)
    }
}

/// `||G||_2^2 = sum |g_k|^2` for a filter or cascade.
///
/// Exact for FIR cascades and cascades with a single first-order section;
/// otherwise a truncated impulse sum with a geometric tail estimate.
pub fn h2_norm_sq<T: Real, S: Stages<T> + ?Sized>(sys: &S) -> Result<NormReport<T>> {
    Rational::from_stages(sys.stages()).energy()
}

/// `||F(z^n) H(z)||_2^2`: output variance per unit white input when `H` runs
/// at the input rate, the signal is decimated by `n`, and `f_low_rate` runs at
/// the decimated rate.
pub fn multirate_norm_sq<T: Real, S: Stages<T> + ?Sized>(
    h: &S,
    f_low_rate: &ComplexFilter<T>,
    n: usize,
) -> Result<NormReport<T>> {
    if n == 0 {
        return Err(DdcError::usage("decimation factor must be at least 1"));
    }
    let mut r = Rational::from_stages(h.stages());
    r.push(f_low_rate, n);
    r.energy()
}

/// Response of `F(z^n) H(z)` at `theta` (input-rate radians per sample).
pub fn multirate_response<T: Real, S: Stages<T> + ?Sized>(
    h: &S,
    f_low_rate: &ComplexFilter<T>,
    n: usize,
    theta: T,
) -> Complex<T> {
    let mut r = Rational::from_stages(h.stages());
    r.push(f_low_rate, n.max(1));
    r.response(theta)
}
