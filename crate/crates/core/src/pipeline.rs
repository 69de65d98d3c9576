//! The downconversion chain: optional pre-mixer filter, digital mixer,
//! envelope filter `H`, optional low-pass, and decimation in either order
//! relative to the low-pass.

use num_complex::Complex;

use crate::analysis::{h2_norm_sq, multirate_norm_sq, NormReport};
use crate::error::{DdcError, Result};
use crate::filter::{ComplexFilter, Domain, FilterState};
use crate::filters::{make_lp, to_baseband};
use crate::scalar::Real;
use crate::signal::{grid_phasor, CarrierConfig, ComplexSeq, RealSeq};

/// Residual level used to size IIR settling horizons.
const SETTLE_EPS: f64 = 1e-12;
/// Largest `N` for which the mixer uses a phasor table.
const MIXER_TABLE_MAX: u32 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Low-pass at the input rate, then decimate.
    FilterThenDecimate,
    /// Decimate, then low-pass at the reduced rate.
    DecimateThenFilter,
}

/// Multiplies by `2 e^{-i delta k}` with `k` absolute.
///
/// For `y[k] = Re{b e^{i delta k}}` the output is `b + b* e^{-2i delta k}`.
pub fn mix_down<T: Real>(y: &RealSeq<T>, carrier: &CarrierConfig<T>) -> ComplexSeq<T> {
    let mut mixer = Mixer::new(carrier, y.start);
    let out = y.samples().iter().map(|&v| mixer.next(Complex::new(v, T::zero()))).collect();
    ComplexSeq::from_trusted(y.start, out)
}

#[derive(Debug, Clone)]
struct Mixer<T> {
    table: Option<Vec<Complex<T>>>,
    m: u64,
    n: u64,
    r: u64,
}

impl<T: Real> Mixer<T> {
    fn new(carrier: &CarrierConfig<T>, start: i64) -> Self {
        let n = u64::from(carrier.n());
        let two = T::lit(2.0);
        let table = (carrier.n() <= MIXER_TABLE_MAX)
            .then(|| (0..n as i64).map(|r| grid_phasor::<T>(-r, n) * two).collect());
        Self { table, m: u64::from(carrier.m()), n, r: carrier.phase_index(start) }
    }

    #[inline]
    fn next(&mut self, u: Complex<T>) -> Complex<T> {
        let lo = match &self.table {
            Some(t) => t[self.r as usize],
            None => grid_phasor::<T>(-(self.r as i64), self.n) * T::lit(2.0),
        };
        self.r = (self.r + self.m) % self.n;
        u * lo
    }
}

#[derive(Debug, Clone, PartialEq)]
enum LowpassSpec<T> {
    Bandwidth(T),
    Filter { filter: ComplexFilter<T>, period_factor: usize },
}

/// Builder for [`DdcChain`].
#[derive(Debug, Clone)]
pub struct ChainBuilder<T> {
    carrier: CarrierConfig<T>,
    pre_mixer: Option<ComplexFilter<T>>,
    ddc_filter: ComplexFilter<T>,
    lowpass: Option<LowpassSpec<T>>,
    decimation: usize,
    phase: usize,
    order: Order,
}

impl<T: Real> ChainBuilder<T> {
    /// Passband filter applied to the real ADC samples before mixing.
    pub fn pre_mixer(mut self, filter: ComplexFilter<T>) -> Self {
        self.pre_mixer = Some(filter);
        self
    }

    /// First-order low-pass of bandwidth `omega_lp` (rad/s), built for the
    /// rate at which it runs under the chosen order.
    pub fn lowpass_bandwidth(mut self, omega_lp: T) -> Self {
        self.lowpass = Some(LowpassSpec::Bandwidth(omega_lp));
        self
    }

    /// An explicit low-pass designed for a sample period of
    /// `period_factor * h`.
    pub fn lowpass_filter(mut self, filter: ComplexFilter<T>, period_factor: usize) -> Self {
        self.lowpass = Some(LowpassSpec::Filter { filter, period_factor });
        self
    }

    pub fn decimate(mut self, factor: usize, order: Order) -> Self {
        self.decimation = factor;
        self.order = order;
        self
    }

    /// Which polyphase branch the decimator keeps; defaults to 0.
    pub fn decimation_phase(mut self, phase: usize) -> Self {
        self.phase = phase;
        self
    }

    pub fn build(self) -> Result<DdcChain<T>> {
        if self.ddc_filter.domain() != Domain::Baseband {
            return Err(DdcError::usage("the envelope filter must be a baseband filter"));
        }
        if let Some(p) = &self.pre_mixer {
            if p.domain() != Domain::Passband {
                return Err(DdcError::usage("the pre-mixer filter must be a passband filter"));
            }
        }
        if self.decimation == 0 {
            return Err(DdcError::usage("decimation factor must be at least 1"));
        }
        if self.phase >= self.decimation {
            return Err(DdcError::usage(format!(
                "decimation phase {} is outside [0, {})",
                self.phase, self.decimation
            )));
        }
        let lp_period = match self.order {
            Order::FilterThenDecimate => 1,
            Order::DecimateThenFilter => self.decimation,
        };
        let lowpass = match self.lowpass {
            None if self.order == Order::DecimateThenFilter => {
                return Err(DdcError::usage("decimating before the low-pass requires a low-pass filter"))
            }
            None => None,
            Some(LowpassSpec::Bandwidth(w)) => {
                Some(make_lp(w, self.carrier.h() * T::from_count(lp_period))?)
            }
            Some(LowpassSpec::Filter { filter, period_factor }) => {
                if filter.domain() != Domain::Baseband {
                    return Err(DdcError::usage("the low-pass must be a baseband filter"));
                }
                if period_factor != lp_period {
                    return Err(DdcError::usage(format!(
                        "the low-pass runs at period {lp_period}h in this order but was designed for {period_factor}h"
                    )));
                }
                Some(filter)
            }
        };
        let pre_baseband = self.pre_mixer.as_ref().map(|p| to_baseband(p, &self.carrier)).transpose()?;
        Ok(DdcChain {
            carrier: self.carrier,
            pre_mixer: self.pre_mixer,
            pre_baseband,
            ddc_filter: self.ddc_filter,
            lowpass,
            decimation: self.decimation,
            phase: self.phase,
            order: self.order,
        })
    }
}

/// Immutable description of a downconversion chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DdcChain<T> {
    carrier: CarrierConfig<T>,
    pre_mixer: Option<ComplexFilter<T>>,
    pre_baseband: Option<ComplexFilter<T>>,
    ddc_filter: ComplexFilter<T>,
    lowpass: Option<ComplexFilter<T>>,
    decimation: usize,
    phase: usize,
    order: Order,
}

/// Output of [`DdcChain::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput<T> {
    /// Envelope estimates; the start index is on the output-rate time axis.
    pub samples: ComplexSeq<T>,
    /// Output sample period in seconds.
    pub sample_period: T,
    /// Sum of the stage group delays at zero frequency, in seconds.
    pub group_delay: T,
    /// Sample-and-hold delay of the output rate, `decimation * h / 2`.
    pub hold_delay: T,
    pub decimation: usize,
    pub phase: usize,
}

impl<T> ChainOutput<T> {
    /// Absolute input index of output sample `j`.
    pub fn input_index(&self, j: i64) -> i64 {
        self.phase as i64 + j * self.decimation as i64
    }
}

fn settle_horizon<T: Real>(f: &ComplexFilter<T>) -> usize {
    let fir = f.taps().len() - 1;
    let iir = f.pole().map_or(0, |p| {
        let r = p.norm();
        if r == T::zero() {
            0
        } else {
            (T::lit(SETTLE_EPS).ln() / r.ln()).ceil().to_usize().unwrap_or(usize::MAX)
        }
    });
    fir.saturating_add(iir)
}

impl<T: Real> DdcChain<T> {
    pub fn builder(carrier: CarrierConfig<T>, ddc_filter: ComplexFilter<T>) -> ChainBuilder<T> {
        ChainBuilder {
            carrier,
            pre_mixer: None,
            ddc_filter,
            lowpass: None,
            decimation: 1,
            phase: 0,
            order: Order::FilterThenDecimate,
        }
    }

    pub fn carrier(&self) -> &CarrierConfig<T> {
        &self.carrier
    }

    pub fn pre_mixer(&self) -> Option<&ComplexFilter<T>> {
        self.pre_mixer.as_ref()
    }

    pub fn ddc_filter(&self) -> &ComplexFilter<T> {
        &self.ddc_filter
    }

    pub fn lowpass(&self) -> Option<&ComplexFilter<T>> {
        self.lowpass.as_ref()
    }

    pub fn decimation(&self) -> usize {
        self.decimation
    }

    pub fn decimation_phase(&self) -> usize {
        self.phase
    }

    pub fn order(&self) -> Order {
        self.order
    }

    fn lowpass_period(&self) -> usize {
        match self.order {
            Order::FilterThenDecimate => 1,
            Order::DecimateThenFilter => self.decimation,
        }
    }

    /// Baseband stages that run at the input rate: the translated pre-mixer
    /// filter and `H`.
    pub fn input_rate_stages(&self) -> Vec<ComplexFilter<T>> {
        self.pre_baseband.iter().chain(std::iter::once(&self.ddc_filter)).cloned().collect()
    }

    /// Input samples affected by the zero initial conditions: FIR lengths
    /// minus one plus, for every pole, `ceil(ln(1e-12)/ln|p|)` samples of the
    /// rate it runs at.
    pub fn transient_length(&self) -> usize {
        let input_rate: usize = self.input_rate_stages().iter().map(settle_horizon).sum();
        let lp = self.lowpass.as_ref().map_or(0, |f| settle_horizon(f).saturating_mul(self.lowpass_period()));
        input_rate.saturating_add(lp)
    }

    pub fn output_period(&self) -> T {
        self.carrier.h() * T::from_count(self.decimation)
    }

    /// Group delay at zero baseband frequency summed over the stages, in
    /// seconds. The hold delay of decimation is reported separately.
    pub fn group_delay(&self) -> T {
        let h = self.carrier.h();
        let input: T = self
            .input_rate_stages()
            .iter()
            .fold(T::zero(), |a, f| a + f.group_delay_samples(T::zero()));
        let lp = self.lowpass.as_ref().map_or(T::zero(), |f| {
            f.group_delay_samples(T::zero()) * T::from_count(self.lowpass_period())
        });
        (input + lp) * h
    }

    /// `h_reg / 2` with `h_reg = decimation * h`.
    pub fn hold_delay(&self) -> T {
        self.output_period() * T::lit(0.5)
    }

    /// Output variance for unit-variance complex white noise at the mixer
    /// output. White real ADC noise of variance `s^2` produces `4 s^2` times
    /// this value.
    pub fn noise_norm_sq(&self) -> Result<NormReport<T>> {
        let mut stages = self.input_rate_stages();
        match (self.order, &self.lowpass) {
            (Order::DecimateThenFilter, Some(lp)) => multirate_norm_sq(&stages, lp, self.decimation),
            (_, lp) => {
                stages.extend(lp.iter().cloned());
                h2_norm_sq(&stages)
            }
        }
    }

    pub fn stream(&self, start: i64) -> DdcStream<'_, T> {
        DdcStream {
            chain: self,
            pre: self.pre_mixer.as_ref().map(FilterState::new),
            h: FilterState::new(&self.ddc_filter),
            lp: self.lowpass.as_ref().map(FilterState::new),
            mixer: Mixer::new(&self.carrier, start),
            next: start,
        }
    }

    pub fn run(&self, y: &RealSeq<T>) -> Result<ChainOutput<T>> {
        let transient = self.transient_length();
        if y.len() < transient {
            return Err(DdcError::usage(format!(
                "input has {} samples but the chain needs at least {transient}",
                y.len()
            )));
        }
        let samples = self.stream(y.start).process(y)?;
        Ok(ChainOutput {
            samples,
            sample_period: self.output_period(),
            group_delay: self.group_delay(),
            hold_delay: self.hold_delay(),
            decimation: self.decimation,
            phase: self.phase,
        })
    }
}

/// Running state of a chain over a contiguous input stream.
#[derive(Debug, Clone)]
pub struct DdcStream<'a, T> {
    chain: &'a DdcChain<T>,
    pre: Option<FilterState<T>>,
    h: FilterState<T>,
    lp: Option<FilterState<T>>,
    mixer: Mixer<T>,
    next: i64,
}

impl<T: Real> DdcStream<'_, T> {
    /// Processes the next block; it must start where the previous one ended.
    pub fn process(&mut self, y: &RealSeq<T>) -> Result<ComplexSeq<T>> {
        if y.start != self.next {
            return Err(DdcError::usage(format!(
                "block starts at {} but the stream expects {}",
                y.start, self.next
            )));
        }
        let chain = self.chain;
        let d = chain.decimation as i64;
        let phase = chain.phase as i64;
        let mut out = Vec::with_capacity(y.len() / chain.decimation + 1);
        let mut first = None;
        for (i, &v) in y.samples().iter().enumerate() {
            let k = y.start + i as i64;
            let mut u = Complex::new(v, T::zero());
            if let (Some(f), Some(s)) = (&chain.pre_mixer, &mut self.pre) {
                u = s.step(f, u);
            }
            let mut x = self.h.step(&chain.ddc_filter, self.mixer.next(u));
            let keep = (k - phase).rem_euclid(d) == 0;
            match chain.order {
                Order::FilterThenDecimate => {
                    if let (Some(f), Some(s)) = (&chain.lowpass, &mut self.lp) {
                        x = s.step(f, x);
                    }
                }
                Order::DecimateThenFilter => {
                    if keep {
                        if let (Some(f), Some(s)) = (&chain.lowpass, &mut self.lp) {
                            x = s.step(f, x);
                        }
                    }
                }
            }
            if keep {
                first.get_or_insert((k - phase).div_euclid(d));
                out.push(x);
            }
        }
        self.next = y.start + y.len() as i64;
        let start = first.unwrap_or_else(|| (self.next - phase + d - 1).div_euclid(d));
        Ok(ComplexSeq::from_trusted(start, out))
    }
}
