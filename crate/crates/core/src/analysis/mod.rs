//! Frequency responses, noise gains, bandwidth tuning and latency metrics.

mod alias;
mod norm;
mod order;
mod response;
mod tune;

pub use alias::{alias_map, harmonic_leakage, AliasBin, AliasPair};
pub use norm::{h2_norm_sq, multirate_norm_sq, multirate_response, NormMethod, NormReport};
pub use order::{compare_order, log_sweep, OrderPoint};
pub use response::{freq_response, phase_metrics, response_at, FreqGrid, PhaseMetrics};
pub use tune::{tune_lp_bandwidth, TunedLowpass};
