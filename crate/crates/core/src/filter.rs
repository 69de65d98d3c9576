//! Complex-coefficient causal filters and their streaming evaluation.
//!
//! Every filter is stored as a feed-forward polynomial over an optional
//! single pole,
//!
//! ```text
//!          b0 + b1 z^-1 + ... + b(L-1) z^-(L-1)
//! G(z) = ---------------------------------------
//!                      1 - p z^-1
//! ```
//!
//! which covers FIR taps, the first-order low-pass `b0 / (1 - p z^-1)` and the
//! first-order high-pass `(1 - z^-1) / (1 - p z^-1)`.

use num_complex::Complex;

use crate::error::{DdcError, Result};
use crate::scalar::Real;
use crate::signal::ComplexSeq;

/// Whether a filter acts on the real passband signal (before the mixer) or
/// on the complex baseband signal (after it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Passband,
    Baseband,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Fir,
    /// `b0 / (1 - p z^-1)`.
    FirstOrderIir,
    /// FIR numerator with more than one tap over a first-order pole.
    PoleZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFilter<T> {
    taps: Vec<Complex<T>>,
    pole: Option<Complex<T>>,
    domain: Domain,
}

fn check_taps<T: Real>(taps: &[Complex<T>]) -> Result<()> {
    if taps.is_empty() {
        return Err(DdcError::InvalidFilter("at least one tap is required".into()));
    }
    if taps.iter().any(|b| !(b.re.is_finite() && b.im.is_finite())) {
        return Err(DdcError::InvalidFilter("taps must be finite".into()));
    }
    Ok(())
}

fn check_pole<T: Real>(p: Complex<T>) -> Result<()> {
    let r = p.norm();
    if !r.is_finite() || r >= T::one() {
        return Err(DdcError::Unstable(r.to_f64_lossy()));
    }
    Ok(())
}

impl<T: Real> ComplexFilter<T> {
    pub fn fir(taps: Vec<Complex<T>>, domain: Domain) -> Result<Self> {
        check_taps(&taps)?;
        Ok(Self { taps, pole: None, domain })
    }

    /// Real-tap FIR convenience constructor.
    pub fn fir_real(taps: &[T], domain: Domain) -> Result<Self> {
        Self::fir(taps.iter().map(|&b| Complex::new(b, T::zero())).collect(), domain)
    }

    /// `gain / (1 - pole z^-1)`, requires `|pole| < 1`.
    pub fn first_order_iir(gain: Complex<T>, pole: Complex<T>, domain: Domain) -> Result<Self> {
        Self::pole_zero(vec![gain], pole, domain)
    }

    pub fn pole_zero(taps: Vec<Complex<T>>, pole: Complex<T>, domain: Domain) -> Result<Self> {
        check_taps(&taps)?;
        check_pole(pole)?;
        Ok(Self { taps, pole: Some(pole), domain })
    }

    pub fn identity(domain: Domain) -> Self {
        Self { taps: vec![Complex::new(T::one(), T::zero())], pole: None, domain }
    }

    /// Pure delay `z^-d`.
    pub fn delay(d: usize, domain: Domain) -> Self {
        let mut taps = vec![Complex::new(T::zero(), T::zero()); d + 1];
        taps[d] = Complex::new(T::one(), T::zero());
        Self { taps, pole: None, domain }
    }

    pub fn taps(&self) -> &[Complex<T>] {
        &self.taps
    }

    pub fn pole(&self) -> Option<Complex<T>> {
        self.pole
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind(&self) -> FilterKind {
        match (self.pole, self.taps.len()) {
            (None, _) => FilterKind::Fir,
            (Some(_), 1) => FilterKind::FirstOrderIir,
            (Some(_), _) => FilterKind::PoleZero,
        }
    }

    pub fn is_fir(&self) -> bool {
        self.pole.is_none()
    }

    pub(crate) fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Multiplies the numerator by a constant.
    pub fn scaled(&self, k: Complex<T>) -> Self {
        Self {
            taps: self.taps.iter().map(|&b| b * k).collect(),
            pole: self.pole,
            domain: self.domain,
        }
    }

    /// Frequency response `G(e^{i*theta})`, theta in radians per sample.
    pub fn response(&self, theta: T) -> Complex<T> {
        let num = self
            .taps
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (m, &b)| {
                acc + b * Complex::from_polar(T::one(), -theta * T::from_count(m))
            });
        match self.pole {
            None => num,
            Some(p) => num / (Complex::new(T::one(), T::zero()) - p * Complex::from_polar(T::one(), -theta)),
        }
    }

    /// Gain at zero frequency.
    pub fn dc_gain(&self) -> Complex<T> {
        let num = self.taps.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
        match self.pole {
            None => num,
            Some(p) => num / (Complex::new(T::one(), T::zero()) - p),
        }
    }

    /// Group delay in samples, `-d arg G / d theta`, from the analytic
    /// derivative of numerator and pole factor.
    pub fn group_delay_samples(&self, theta: T) -> T {
        let one = Complex::new(T::one(), T::zero());
        let mut num = Complex::new(T::zero(), T::zero());
        let mut dnum = Complex::new(T::zero(), T::zero());
        for (m, &b) in self.taps.iter().enumerate() {
            let t = b * Complex::from_polar(T::one(), -theta * T::from_count(m));
            num += t;
            dnum += t * T::from_count(m);
        }
        let mut tau = (dnum / num).re;
        if let Some(p) = self.pole {
            let pe = p * Complex::from_polar(T::one(), -theta);
            tau += (pe / (one - pe)).re;
        }
        tau
    }

    /// First `len` samples of the impulse response.
    pub fn impulse_response(&self, len: usize) -> Vec<Complex<T>> {
        let mut state = FilterState::new(self);
        (0..len)
            .map(|k| {
                let x = if k == 0 { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) };
                state.step(self, x)
            })
            .collect()
    }

    /// Strips exact-zero leading and trailing taps. Returns the stripped
    /// filter and the integer delay (number of leading zeros) that restores
    /// the original response. An all-zero numerator keeps a single zero tap.
    pub fn canonicalize(&self) -> (Self, usize) {
        if self.kind() == FilterKind::FirstOrderIir {
            return (self.clone(), 0);
        }
        let zero = Complex::new(T::zero(), T::zero());
        let Some(first) = self.taps.iter().position(|&b| b != zero) else {
            return (Self { taps: vec![zero], ..self.clone() }, 0);
        };
        let last = self.taps.iter().rposition(|&b| b != zero).unwrap_or(first);
        (Self { taps: self.taps[first..=last].to_vec(), ..self.clone() }, first)
    }

    /// Product of two filters in the same domain. Numerators are convolved;
    /// at most one of the two may carry a pole.
    pub fn cascade(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(DdcError::usage("cannot cascade passband and baseband filters"));
        }
        let pole = match (self.pole, other.pole) {
            (Some(_), Some(_)) => {
                return Err(DdcError::usage(
                    "a single filter holds at most one pole; keep both stages in a Cascade",
                ))
            }
            (p, None) | (None, p) => p,
        };
        Ok(Self { taps: convolve(&self.taps, &other.taps), pole, domain: self.domain })
    }

    /// Filters a block. The state must have been created for this filter.
    pub fn process(&self, state: &mut FilterState<T>, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        state.check(self)?;
        Ok(x.iter().map(|&s| state.step(self, s)).collect())
    }
}

/// Full linear convolution of two tap vectors.
pub fn convolve<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Delay line and recursion accumulator of one filter.
///
/// Zero initial conditions after construction or [`FilterState::reset`].
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState<T> {
    history: Vec<Complex<T>>,
    acc: Complex<T>,
    has_pole: bool,
}

impl<T: Real> FilterState<T> {
    pub fn new(filter: &ComplexFilter<T>) -> Self {
        Self {
            history: vec![Complex::new(T::zero(), T::zero()); filter.taps.len() - 1],
            acc: Complex::new(T::zero(), T::zero()),
            has_pole: filter.pole.is_some(),
        }
    }

    pub fn reset(&mut self) {
        self.history.iter_mut().for_each(|h| *h = Complex::new(T::zero(), T::zero()));
        self.acc = Complex::new(T::zero(), T::zero());
    }

    fn check(&self, filter: &ComplexFilter<T>) -> Result<()> {
        if self.history.len() + 1 != filter.taps.len() || self.has_pole != filter.pole.is_some() {
            return Err(DdcError::usage("filter state does not belong to this filter"));
        }
        Ok(())
    }

    /// One sample through the direct form. The tap sum is always taken in
    /// index order, so block boundaries never change the result.
    #[inline]
    pub(crate) fn step(&mut self, filter: &ComplexFilter<T>, x: Complex<T>) -> Complex<T> {
        let taps = &filter.taps;
        let mut y = taps[0] * x;
        for (b, h) in taps[1..].iter().zip(&self.history) {
            y += *b * *h;
        }
        if let Some(p) = filter.pole {
            y += p * self.acc;
            self.acc = y;
        }
        if !self.history.is_empty() {
            self.history.rotate_right(1);
            self.history[0] = x;
        }
        y
    }
}

/// Streams `x` through `filter`, continuing from `state`. The output keeps
/// the start index of the input.
pub fn filter_stream<T: Real>(
    filter: &ComplexFilter<T>,
    state: &mut FilterState<T>,
    x: &ComplexSeq<T>,
) -> Result<ComplexSeq<T>> {
    let y = filter.process(state, x.samples())?;
    Ok(ComplexSeq::from_trusted(x.start, y))
}

/// Anything that can be viewed as an ordered list of filter stages.
pub trait Stages<T> {
    fn stages(&self) -> &[ComplexFilter<T>];
}

impl<T> Stages<T> for ComplexFilter<T> {
    fn stages(&self) -> &[ComplexFilter<T>] {
        std::slice::from_ref(self)
    }
}

impl<T> Stages<T> for [ComplexFilter<T>] {
    fn stages(&self) -> &[ComplexFilter<T>] {
        self
    }
}

impl<T> Stages<T> for Vec<ComplexFilter<T>> {
    fn stages(&self) -> &[ComplexFilter<T>] {
        self
    }
}

/// Series connection of filters in one domain, evaluated as the product of
/// the stage responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade<T> {
    stages: Vec<ComplexFilter<T>>,
}

impl<T: Real> Cascade<T> {
    pub fn new(stages: Vec<ComplexFilter<T>>) -> Result<Self> {
        let Some(first) = stages.first() else {
            return Err(DdcError::usage("a cascade needs at least one stage"));
        };
        if stages.iter().any(|s| s.domain != first.domain) {
            return Err(DdcError::usage("cascade stages must share one domain"));
        }
        Ok(Self { stages })
    }

    pub fn push(&mut self, stage: ComplexFilter<T>) -> Result<()> {
        if stage.domain != self.stages[0].domain {
            return Err(DdcError::usage("cascade stages must share one domain"));
        }
        self.stages.push(stage);
        Ok(())
    }

    pub fn response(&self, theta: T) -> Complex<T> {
        self.stages
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, s| acc * s.response(theta))
    }

    pub fn group_delay_samples(&self, theta: T) -> T {
        self.stages.iter().fold(T::zero(), |acc, s| acc + s.group_delay_samples(theta))
    }

    /// Collapses the cascade into a single filter when it holds at most one
    /// pole, convolving the numerators.
    pub fn materialize(&self) -> Result<ComplexFilter<T>> {
        let mut it = self.stages.iter();
        let mut acc = it.next().expect("non-empty").clone();
        for s in it {
            acc = acc.cascade(s)?;
        }
        Ok(acc)
    }
}

impl<T> Stages<T> for Cascade<T> {
    fn stages(&self) -> &[ComplexFilter<T>] {
        &self.stages
    }
}

impl<T: Real> From<ComplexFilter<T>> for Cascade<T> {
    fn from(f: ComplexFilter<T>) -> Self {
        Self { stages: vec![f] }
    }
}
