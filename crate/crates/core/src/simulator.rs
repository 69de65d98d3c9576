//! Synthetic ADC streams and experiments that compare a chain's output with
//! the envelope it should recover and with the analytic noise gain.
//!
//! White noise is real Gaussian, added at the ADC before mixing, so the
//! baseband noise the chain sees is cyclostationary. Samples come from
//! ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, mapped through the
//! `rand_distr` standard normal sampler; a given seed yields the same stream
//! on every platform.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::analysis::NormReport;
use crate::error::{DdcError, Result};
use crate::filter::ComplexFilter;
use crate::filters::make_iq;
use crate::pipeline::{ChainOutput, DdcChain};
use crate::scalar::{gcd, Real};
use crate::signal::{CarrierConfig, RealSeq};

/// Complex envelope trajectory `b[k]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope<T> {
    Constant(Complex<T>),
    /// `before` for `k < at`, `after` from `at` on.
    Step { before: Complex<T>, after: Complex<T>, at: i64 },
    /// `start * e^{i rate k}`, `rate` in rad/sample.
    RampPhase { start: Complex<T>, rate: T },
    /// Explicit samples from `k = 0`; the last value is held afterwards and
    /// the first value before.
    Samples(Vec<Complex<T>>),
}

impl<T: Real> Envelope<T> {
    pub fn at(&self, k: i64) -> Complex<T> {
        match self {
            Envelope::Constant(b) => *b,
            Envelope::Step { before, after, at } => {
                if k < *at {
                    *before
                } else {
                    *after
                }
            }
            Envelope::RampPhase { start, rate } => *start * Complex::from_polar(T::one(), *rate * T::from(k).unwrap()),
            Envelope::Samples(v) => match v.len() {
                0 => Complex::new(T::zero(), T::zero()),
                n => v[(k.max(0) as usize).min(n - 1)],
            },
        }
    }
}

/// Passband harmonic `Re{amplitude e^{i order delta k}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic<T> {
    pub order: u32,
    pub amplitude: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec<T> {
    pub envelope: Envelope<T>,
    /// Standard deviation of the white ADC noise per sample.
    pub noise_sigma: T,
    /// ADC offset `n0`.
    pub dc_offset: T,
    pub harmonics: Vec<Harmonic<T>>,
    pub seed: u64,
}

impl<T: Real> SignalSpec<T> {
    pub fn new(envelope: Envelope<T>) -> Self {
        Self { envelope, noise_sigma: T::zero(), dc_offset: T::zero(), harmonics: Vec::new(), seed: 0 }
    }

    pub fn with_noise(mut self, sigma: T, seed: u64) -> Self {
        self.noise_sigma = sigma;
        self.seed = seed;
        self
    }

    pub fn with_dc_offset(mut self, n0: T) -> Self {
        self.dc_offset = n0;
        self
    }

    pub fn with_harmonic(mut self, order: u32, amplitude: Complex<T>) -> Self {
        self.harmonics.push(Harmonic { order, amplitude });
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= T::zero()) {
            return Err(DdcError::usage("noise standard deviation must be finite and non-negative"));
        }
        if !self.dc_offset.is_finite() {
            return Err(DdcError::usage("DC offset must be finite"));
        }
        for (i, h) in self.harmonics.iter().enumerate() {
            if h.order < 2 {
                return Err(DdcError::usage(format!("harmonic order {} is below 2", h.order)));
            }
            if self.harmonics[..i].iter().any(|o| o.order == h.order) {
                return Err(DdcError::usage(format!("harmonic order {} listed twice", h.order)));
            }
        }
        Ok(())
    }
}

fn clean_signal<T: Real>(spec: &SignalSpec<T>, carrier: &CarrierConfig<T>, len: usize) -> RealSeq<T> {
    let m = i64::from(carrier.m());
    let y = (0..len as i64)
        .map(|k| {
            let mut v = (spec.envelope.at(k) * carrier.phasor(k)).re + spec.dc_offset;
            for h in &spec.harmonics {
                let r = (i64::from(h.order) * m % i64::from(carrier.n())) * (k % i64::from(carrier.n()));
                v += (h.amplitude * carrier.grid_phasor(r)).re;
            }
            v
        })
        .collect();
    RealSeq::from_trusted(0, y)
}

fn noise_signal<T: Real>(sigma: T, seed: u64, len: usize) -> RealSeq<T>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..len)
        .map(|_| {
            let z: T = StandardNormal.sample(&mut rng);
            z * sigma
        })
        .collect();
    RealSeq::from_trusted(0, w)
}

/// `y[k] = Re{b[k] e^{i delta k}} + sum_m Re{a_m e^{i m delta k}} + n0 + w[k]`
/// for `k = 0..len`.
pub fn synthesize<T: Real>(spec: &SignalSpec<T>, carrier: &CarrierConfig<T>, len: usize) -> Result<RealSeq<T>>
where
    StandardNormal: Distribution<T>,
{
    spec.validate()?;
    if len == 0 {
        return Err(DdcError::usage("at least one sample is required"));
    }
    let clean = clean_signal(spec, carrier, len);
    if spec.noise_sigma == T::zero() {
        return Ok(clean);
    }
    let noise = noise_signal(spec.noise_sigma, spec.seed, len);
    let y = clean.samples().iter().zip(noise.samples()).map(|(&a, &b)| a + b).collect();
    Ok(RealSeq::from_trusted(0, y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport<T> {
    /// RMS of `|output - b|` over the samples after the transient.
    pub rms_envelope_error: T,
    /// Magnitude of the residual tone at the DC-spur frequency `-delta`.
    pub spur_magnitude: T,
    /// `spur_magnitude` in dB relative to the RMS envelope magnitude (or to 1
    /// when the envelope is zero).
    pub spur_level_db: T,
    /// Output noise variance over `4 sigma^2`; `None` without noise.
    pub noise_gain_empirical: Option<T>,
    /// Batch-means standard error of `noise_gain_empirical`.
    pub noise_gain_stderr: Option<T>,
    pub noise_gain_analytic: NormReport<T>,
    pub settling_samples: usize,
    /// Output samples included in the statistics.
    pub evaluated_samples: usize,
}

const NOISE_BATCHES: usize = 20;
const SPUR_FLOOR: f64 = 1e-300;

/// Output samples whose input index lies at or after `settle`.
fn settled<T: Real>(out: &ChainOutput<T>, settle: usize) -> Vec<(i64, Complex<T>)> {
    let start = out.samples.start;
    out.samples
        .samples()
        .iter()
        .enumerate()
        .map(|(j, &z)| (out.input_index(start + j as i64), z))
        .filter(|&(k, _)| k >= settle as i64)
        .collect()
}

pub fn run_experiment<T: Real>(spec: &SignalSpec<T>, chain: &DdcChain<T>, len: usize) -> Result<ExperimentReport<T>>
where
    StandardNormal: Distribution<T>,
{
    spec.validate()?;
    let carrier = chain.carrier();
    let settle = chain.transient_length();
    if len == 0 || len < settle.saturating_mul(10) {
        return Err(DdcError::usage(format!(
            "experiment needs at least {} samples (10x the transient of {settle})",
            settle.saturating_mul(10).max(1)
        )));
    }
    let clean = settled(&chain.run(&clean_signal(spec, carrier, len))?, settle);
    if clean.is_empty() {
        return Err(DdcError::usage("no output samples remain after the transient"));
    }
    let noise = if spec.noise_sigma > T::zero() {
        Some(settled(&chain.run(&noise_signal(spec.noise_sigma, spec.seed, len))?, settle))
    } else {
        None
    };
    let count = T::from_count(clean.len());

    let mut sq = T::zero();
    let mut env = T::zero();
    for (i, &(k, z)) in clean.iter().enumerate() {
        let b = spec.envelope.at(k);
        let total = noise.as_ref().map_or(z, |n| z + n[i].1);
        sq += (total - b).norm_sqr();
        env += b.norm_sqr();
    }
    let rms_envelope_error = (sq / count).sqrt();
    let env_rms = (env / count).sqrt();

    // coherent demodulation at -delta over whole spur periods
    let step = (u64::from(carrier.m()) * chain.decimation() as u64) % u64::from(carrier.n());
    let period = (u64::from(carrier.n()) / gcd(step, u64::from(carrier.n()))) as usize;
    let whole = (clean.len() / period) * period;
    let window = &clean[clean.len() - if whole == 0 { clean.len() } else { whole }..];
    let acc = window.iter().fold(Complex::new(T::zero(), T::zero()), |a, &(k, z)| {
        a + (z - spec.envelope.at(k)) * carrier.phasor(k)
    });
    let spur_magnitude = acc.norm() / T::from_count(window.len());
    let reference = if env_rms > T::zero() { env_rms } else { T::one() };
    let spur_level_db = T::lit(20.0) * (spur_magnitude.max(T::lit(SPUR_FLOOR)) / reference).log10();

    let (noise_gain_empirical, noise_gain_stderr) = match &noise {
        Some(n) => {
            let scale = T::lit(4.0) * spec.noise_sigma * spec.noise_sigma;
            let gains: Vec<T> = n.iter().map(|(_, z)| z.norm_sqr() / scale).collect();
            let (mean, se) = batch_mean(&gains, NOISE_BATCHES);
            (Some(mean), Some(se))
        }
        None => (None, None),
    };

    Ok(ExperimentReport {
        rms_envelope_error,
        spur_magnitude,
        spur_level_db,
        noise_gain_empirical,
        noise_gain_stderr,
        noise_gain_analytic: chain.noise_norm_sq()?,
        settling_samples: settle,
        evaluated_samples: clean.len(),
    })
}

/// Mean and batch-means standard error.
fn batch_mean<T: Real>(x: &[T], batches: usize) -> (T, T) {
    let n = x.len();
    let mean = x.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(n.max(1));
    let per = n / batches;
    if per == 0 {
        return (mean, T::nan());
    }
    let means: Vec<T> = x
        .chunks_exact(per)
        .take(batches)
        .map(|c| c.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(per))
        .collect();
    (mean, stderr_of(&means))
}

fn stderr_of<T: Real>(x: &[T]) -> T {
    let n = T::from_count(x.len());
    let mean = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let var = x.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / (n - T::one());
    (var / n).sqrt()
}

/// Noise-gain statistics over several independent seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSweep<T> {
    pub reports: Vec<ExperimentReport<T>>,
    pub noise_gain_mean: T,
    /// Standard error from the spread of the per-seed estimates.
    pub noise_gain_stderr: T,
    pub noise_gain_analytic: NormReport<T>,
}

impl<T: Real> SeedSweep<T> {
    /// `(empirical - analytic) / stderr`.
    pub fn z_score(&self) -> T {
        (self.noise_gain_mean - self.noise_gain_analytic.value) / self.noise_gain_stderr
    }
}

/// Runs the experiment once per seed (in parallel); results are in seed order.
pub fn run_seeds<T: Real>(spec: &SignalSpec<T>, chain: &DdcChain<T>, len: usize, seeds: &[u64]) -> Result<SeedSweep<T>>
where
    StandardNormal: Distribution<T>,
{
    if seeds.len() < 2 {
        return Err(DdcError::usage("a seed sweep needs at least two seeds"));
    }
    if spec.noise_sigma <= T::zero() {
        return Err(DdcError::usage("a seed sweep needs a positive noise level"));
    }
    let reports = seeds
        .par_iter()
        .map(|&s| run_experiment(&SignalSpec { seed: s, ..spec.clone() }, chain, len))
        .collect::<Result<Vec<_>>>()?;
    let gains: Vec<T> = reports.iter().filter_map(|r| r.noise_gain_empirical).collect();
    let n = T::from_count(gains.len());
    let noise_gain_mean = gains.iter().fold(T::zero(), |a, &b| a + b) / n;
    Ok(SeedSweep {
        noise_gain_mean,
        noise_gain_stderr: stderr_of(&gains),
        noise_gain_analytic: reports[0].noise_gain_analytic,
        reports,
    })
}

/// Steady-state error of the envelope estimate for a constant envelope `b`
/// contaminated by one passband harmonic, measured at the last output sample.
pub fn harmonic_bias<T: Real>(
    carrier: &CarrierConfig<T>,
    ddc_filter: &ComplexFilter<T>,
    b: Complex<T>,
    harmonic: Harmonic<T>,
    len: usize,
) -> Result<Complex<T>>
where
    StandardNormal: Distribution<T>,
{
    let chain = DdcChain::builder(*carrier, ddc_filter.clone()).build()?;
    if len < chain.transient_length().saturating_mul(10).max(1) {
        return Err(DdcError::usage("too few samples for a steady-state estimate"));
    }
    let spec = SignalSpec::new(Envelope::Constant(b)).with_harmonic(harmonic.order, harmonic.amplitude);
    let out = chain.run(&synthesize(&spec, carrier, len)?)?;
    let last = *out.samples.samples().last().expect("non-empty output");
    Ok(last - b)
}

/// [`harmonic_bias`] for IQ sampling with a real third-harmonic amplitude and
/// unit envelope. The carrier must be at `fs/4`.
pub fn iq_harmonic_bias<T: Real>(carrier: &CarrierConfig<T>, a3: T, len: usize) -> Result<Complex<T>>
where
    StandardNormal: Distribution<T>,
{
    let h = make_iq(carrier)?;
    harmonic_bias(
        carrier,
        &h,
        Complex::new(T::one(), T::zero()),
        Harmonic { order: 3, amplitude: Complex::new(a3, T::zero()) },
        len,
    )
}
