//! Simulation settings merged from a preset, a `key=value` config file and
//! command-line flags, in that order.

use std::path::Path;

use ddc_core::Order;

use crate::error::{CliError, CliResult};
use crate::parse;
use crate::preset::Preset;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimSettings {
    pub carrier: Option<String>,
    pub fs: Option<f64>,
    pub filter: Option<String>,
    pub envelope: Option<String>,
    pub noise: Option<f64>,
    pub dc_offset: Option<f64>,
    pub harmonics: Vec<String>,
    pub dcr: bool,
    pub hp: Option<f64>,
    pub lp: Option<f64>,
    pub lp_hz: Option<f64>,
    pub decimate: Option<usize>,
    pub order: Option<Order>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.trim().parse().map_err(|_| CliError::usage(format!("bad value for {key}: '{value}'")))
}

fn finite(key: &str, value: &str) -> CliResult<f64> {
    let v: f64 = number(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{key} must be finite")))
    }
}

pub fn order(value: &str) -> CliResult<Order> {
    match value.trim() {
        "lp-first" => Ok(Order::FilterThenDecimate),
        "decimate-first" => Ok(Order::DecimateThenFilter),
        v => Err(CliError::usage(format!("order must be lp-first or decimate-first, got '{v}'"))),
    }
}

impl SimSettings {
    pub fn set(&mut self, key: &str, value: &str) -> CliResult {
        let v = value.trim();
        match key {
            "carrier" => {
                parse::carrier_ratio(v)?;
                self.carrier = Some(v.to_string());
            }
            "fs" => self.fs = Some(finite(key, v)?),
            "filter" => {
                parse::filter_spec(v)?;
                self.filter = Some(v.to_string());
            }
            "envelope" => {
                parse::envelope(v)?;
                self.envelope = Some(v.to_string());
            }
            "noise" => self.noise = Some(finite(key, v)?),
            "dc-offset" => self.dc_offset = Some(finite(key, v)?),
            "harmonic" => {
                for h in v.split(',').filter(|h| !h.trim().is_empty()) {
                    parse::harmonic(h)?;
                    self.harmonics.push(h.trim().to_string());
                }
            }
            "dcr" => self.dcr = number(key, v)?,
            "hp" => self.hp = Some(finite(key, v)?),
            "lp" => self.lp = Some(finite(key, v)?),
            "lp-hz" => self.lp_hz = Some(finite(key, v)?),
            "decimate" => self.decimate = Some(number(key, v)?),
            "order" => self.order = Some(order(v)?),
            "samples" => self.samples = Some(number(key, v)?),
            "seed" => self.seed = Some(number(key, v)?),
            "seeds" => self.seeds = Some(number(key, v)?),
            _ => return Err(CliError::usage(format!("unknown setting '{key}'"))),
        }
        Ok(())
    }

    pub fn apply_preset(&mut self, p: &Preset) -> CliResult {
        for (k, v) in p.settings() {
            self.set(k, &v)?;
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> CliResult {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("{origin}:{}: expected key=value", i + 1)))?;
            self.set(k.trim(), v).map_err(|e| CliError::usage(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> CliResult {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }
}
