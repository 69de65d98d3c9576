//! `ddc`: frequency responses, noise norms, low-pass tuning, ordering
//! studies and simulations for digital downconversion chains.

mod commands;
mod error;
mod parse;
mod preset;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{FilterInput, SimRequest};
use error::{CliError, CliResult};
use settings::SimSettings;

#[derive(Parser)]
#[command(name = "ddc", version, about = "Low-latency digital downconversion analysis and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FilterArgs {
    /// Filter spec: ma:N, 2sr, dcr, iq, lp:<omega_lp/omega_s>, hp:<p>, joined by '+'
    #[arg(long, allow_hyphen_values = true)]
    filter: String,
    /// Carrier as M/N (M carrier periods in N samples)
    #[arg(long, value_name = "M/N")]
    carrier: Option<String>,
    /// Sample rate in Hz
    #[arg(long, value_name = "HZ")]
    fs: Option<f64>,
}

impl FilterArgs {
    fn input(&self) -> FilterInput<'_> {
        FilterInput { filter: &self.filter, carrier: self.carrier.as_deref(), fs: self.fs }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Magnitude and phase on a symmetric grid over (-pi, pi], as CSV
    FreqResponse {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = 4096)]
        points: usize,
        /// Write the CSV here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squared H2 norm (white-noise gain)
    Norm {
        #[command(flatten)]
        filter: FilterArgs,
        /// Append a first-order low-pass with this omega_lp/omega_s
        #[arg(long, allow_hyphen_values = true)]
        lp: Option<f64>,
        #[arg(long)]
        decimate: Option<usize>,
        /// Run the low-pass after decimation (multirate norm)
        #[arg(long)]
        lp_after_decimation: bool,
    },
    /// Low-pass bandwidth that meets a noise-rejection target
    Tune {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, allow_hyphen_values = true)]
        target_db: f64,
    },
    /// Noise rejection with the low-pass before and after decimation, as CSV
    CompareOrder {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        decimate: usize,
        /// Smallest omega_lp/omega_s of the sweep
        #[arg(long, default_value_t = 1e-5)]
        from: f64,
        /// Largest omega_lp/omega_s of the sweep
        #[arg(long, default_value_t = 1e-1)]
        to: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a chain on a synthetic ADC stream
    Simulate(SimulateArgs),
    /// Built-in configurations
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Print a preset (or all) in the --config format
    Show { name: Option<String> },
}

#[derive(Args)]
struct SimulateArgs {
    /// lcls2 or ess
    #[arg(long)]
    preset: Option<String>,
    /// key=value settings file (keys as the long flags below)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "M/N")]
    carrier: Option<String>,
    #[arg(long, value_name = "HZ")]
    fs: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    filter: Option<String>,
    /// const:B, step:B0,B1,K or ramp:B,RATE
    #[arg(long, allow_hyphen_values = true)]
    envelope: Option<String>,
    /// Standard deviation of white ADC noise
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dc_offset: Option<f64>,
    /// ORDER:AMPLITUDE, repeatable
    #[arg(long, allow_hyphen_values = true)]
    harmonic: Vec<String>,
    /// Append DC-spur rejection to the DDC filter
    #[arg(long)]
    dcr: bool,
    /// Pre-mixer high-pass (1 - z^-1)/(1 - p z^-1)
    #[arg(long)]
    hp: Option<f64>,
    /// Low-pass bandwidth as omega_lp/omega_s
    #[arg(long)]
    lp: Option<f64>,
    /// Low-pass bandwidth in Hz
    #[arg(long)]
    lp_hz: Option<f64>,
    /// Use the preset's default low-pass bandwidth
    #[arg(long)]
    preset_lp: bool,
    #[arg(long)]
    decimate: Option<usize>,
    /// lp-first or decimate-first
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds to sweep
    #[arg(long)]
    seeds: Option<usize>,
    /// Write the output envelope of the first seed as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
}

impl SimulateArgs {
    fn request(&self) -> CliResult<SimRequest> {
        let mut s = SimSettings::default();
        let mut preset_lp_hz = None;
        if let Some(name) = &self.preset {
            let p = preset::find(name).ok_or_else(|| CliError::usage(format!("unknown preset '{name}' (lcls2, ess)")))?;
            s.apply_preset(p)?;
            if self.preset_lp {
                preset_lp_hz = Some(p.lp_hz.ok_or_else(|| CliError::usage(format!("preset {} has no default low-pass", p.name)))?);
            }
        } else if self.preset_lp {
            return Err(CliError::usage("--preset-lp needs --preset"));
        }
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        let flags: [(&str, Option<String>); 15] = [
            ("carrier", self.carrier.clone()),
            ("fs", self.fs.map(|v| v.to_string())),
            ("filter", self.filter.clone()),
            ("envelope", self.envelope.clone()),
            ("noise", self.noise.map(|v| v.to_string())),
            ("dc-offset", self.dc_offset.map(|v| v.to_string())),
            ("dcr", self.dcr.then(|| "true".to_string())),
            ("hp", self.hp.map(|v| v.to_string())),
            ("lp", self.lp.map(|v| v.to_string())),
            ("lp-hz", self.lp_hz.map(|v| v.to_string())),
            ("decimate", self.decimate.map(|v| v.to_string())),
            ("order", self.order.clone()),
            ("samples", self.samples.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("seeds", self.seeds.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.set(k, &v)?;
            }
        }
        for h in &self.harmonic {
            s.set("harmonic", h)?;
        }
        if preset_lp_hz.is_some() && (s.lp.is_some() || s.lp_hz.is_some()) {
            return Err(CliError::usage("--preset-lp conflicts with an explicit low-pass"));
        }
        Ok(SimRequest { settings: s, preset_lp_hz, trace: self.trace.clone() })
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::FreqResponse { filter, points, out } => commands::frequency(&filter.input(), points, out.as_deref()),
        Command::Norm { filter, lp, decimate, lp_after_decimation } => {
            commands::norm(&filter.input(), lp, decimate, lp_after_decimation)
        }
        Command::Tune { filter, target_db } => commands::tune(&filter.input(), target_db),
        Command::CompareOrder { filter, decimate, from, to, points, out } => {
            commands::compare(&filter.input(), decimate, from, to, points, out.as_deref())
        }
        Command::Simulate(args) => commands::simulate(&args.request()?),
        Command::Preset { action: PresetAction::Show { name } } => commands::preset_show(name.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
