//! Low-latency digital downconversion for control applications.
//!
//! A sampled carrier `y[k] = Re{b[k] e^{i delta k}}` is mixed down by
//! `2 e^{-i delta k}` and filtered by a short complex-coefficient filter to
//! estimate the complex envelope `b[k]`. The crate provides
//!
//! - [`signal`]: carrier configuration (`delta = 2*pi*M/N`), sequences, decimation;
//! - [`filter`]: complex filters, streaming state and cascades;
//! - [`filters`]: moving average, two-sample reconstruction, DC-spur rejection,
//!   IQ, first-order low-pass and pre-mixer high-pass constructors;
//! - [`pipeline`]: the full mixer/filter/low-pass/decimator chain;
//! - [`analysis`]: frequency responses, single- and multirate H2 norms,
//!   low-pass tuning, group delay and harmonic alias maps;
//! - [`simulator`]: synthetic ADC streams and Monte-Carlo experiments.
//!
//! Everything is generic over the [`Real`] scalar; `f64` aliases are
//! exported for the common case.
//!
//! ```
//! use ddc_core::{filters, Carrier, Chain, C64, RealSeq64};
//!
//! let carrier = Carrier::new(7, 33, 94.29e6).unwrap();
//! let chain = Chain::builder(carrier, filters::make_2sr(&carrier).unwrap()).build().unwrap();
//! let b = C64::new(1.0, 2.0);
//! let y: Vec<f64> = (0..64).map(|k| (b * carrier.phasor(k)).re).collect();
//! let out = chain.run(&RealSeq64::new(0, y).unwrap()).unwrap();
//! assert!((out.samples.samples()[10] - b).norm() < 1e-12);
//! ```

pub mod analysis;
mod error;
pub mod filter;
pub mod filters;
pub mod pipeline;
mod scalar;
pub mod signal;
pub mod simulator;

pub use error::{DdcError, ErrorKind, Result};
pub use filter::{filter_stream, Cascade, ComplexFilter, Domain, FilterKind, FilterState, Stages};
pub use pipeline::{mix_down, ChainBuilder, ChainOutput, DdcChain, DdcStream, Order};
pub use scalar::{wrap_angle, Real};
pub use signal::{decimate, grid_phasor, CarrierConfig, ComplexSeq, RealSeq};

pub type C64 = num_complex::Complex<f64>;
pub type Carrier = CarrierConfig<f64>;
pub type Filter = ComplexFilter<f64>;
pub type Chain = DdcChain<f64>;
pub type ComplexSeq64 = ComplexSeq<f64>;
pub type RealSeq64 = RealSeq<f64>;
pub type Norm = analysis::NormReport<f64>;

pub type Carrier32 = CarrierConfig<f32>;
pub type Filter32 = ComplexFilter<f32>;
pub type Chain32 = DdcChain<f32>;
