use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use ddc_core::analysis::{
    compare_order, freq_response, h2_norm_sq, log_sweep, multirate_norm_sq, tune_lp_bandwidth, FreqGrid, NormReport,
};
use ddc_core::filters::{make_dc_reject_passband, make_dcr, make_lp};
use ddc_core::simulator::{run_experiment, run_seeds, synthesize, ExperimentReport, SignalSpec};
use ddc_core::{Carrier, Cascade, Chain, Order};

use crate::error::{CliError, CliResult};
use crate::parse::{self, Token};
use crate::preset::{self, Preset, PRESETS};
use crate::settings::{SimSettings, DEFAULT_SAMPLES};

fn csv_sink(out: Option<&Path>) -> CliResult<csv::Writer<Box<dyn Write>>> {
    let w: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(w))
}

/// Fixed nine-decimal rendering; rounding residue never prints as `-0`.
fn fixed(v: f64) -> String {
    let s = format!("{v:.9}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn db20(mag: f64) -> f64 {
    20.0 * mag.max(1e-300).log10()
}

fn format_norm(r: &NormReport<f64>) -> String {
    let mut s = format!("{:.6} ({:.2} dB) [{}]", r.value, r.value_db(), r.method_name());
    if r.is_degraded() {
        s += " (degraded precision)";
    }
    s
}

pub struct FilterInput<'a> {
    pub filter: &'a str,
    pub carrier: Option<&'a str>,
    pub fs: Option<f64>,
}

impl FilterInput<'_> {
    fn resolve(&self) -> CliResult<(Vec<Token>, Option<Carrier>)> {
        Ok((parse::filter_spec(self.filter)?, parse::carrier(self.carrier, self.fs)?))
    }
}

pub fn frequency(input: &FilterInput, points: usize, out: Option<&Path>) -> CliResult {
    let (tokens, carrier) = input.resolve()?;
    let stages = parse::stages(&tokens, carrier.as_ref())?;
    let grid = FreqGrid::<f64>::symmetric(points)?;
    let resp = freq_response(&stages, &grid);
    let mut w = csv_sink(out)?;
    match input.fs {
        Some(fs) => {
            w.write_record(["theta_rad", "freq_hz", "mag_db", "phase_deg"])?;
            for ((t, f), g) in grid.thetas().iter().zip(grid.hz(fs)).zip(&resp) {
                w.write_record([fixed(*t), fixed(f), fixed(db20(g.norm())), fixed(g.arg().to_degrees())])?;
            }
        }
        None => {
            w.write_record(["theta_rad", "mag_db", "phase_deg"])?;
            for (t, g) in grid.thetas().iter().zip(&resp) {
                w.write_record([fixed(*t), fixed(db20(g.norm())), fixed(g.arg().to_degrees())])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn norm(input: &FilterInput, lp: Option<f64>, decimate: Option<usize>, lp_after_decimation: bool) -> CliResult {
    let (tokens, carrier) = input.resolve()?;
    let mut stages = parse::stages(&tokens, carrier.as_ref())?;
    let report = match (lp, lp_after_decimation) {
        (Some(r), true) => {
            let n = decimate.ok_or_else(|| CliError::usage("--lp-after-decimation needs --decimate N"))?;
            if n == 0 {
                return Err(CliError::usage("decimation factor must be at least 1"));
            }
            multirate_norm_sq(&stages, &make_lp(TAU * r, n as f64)?, n)?
        }
        (None, true) => return Err(CliError::usage("--lp-after-decimation needs --lp")),
        (lp, false) => {
            if let Some(r) = lp {
                stages.push(make_lp(TAU * r, 1.0)?);
            }
            h2_norm_sq(&stages)?
        }
    };
    println!("{}", format_norm(&report));
    Ok(())
}

pub fn tune(input: &FilterInput, target_db: f64) -> CliResult {
    let (tokens, carrier) = input.resolve()?;
    let stages = parse::stages(&tokens, carrier.as_ref())?;
    let h = input.fs.map_or(1.0, |fs| 1.0 / fs);
    let t = tune_lp_bandwidth(&stages, target_db, h)?;
    let mut line = format!(
        "omega_lp/omega_s = {:.6} (omega_lp*h = {:.6}, norm {:.6} dB)",
        t.omega_over_omega_s(),
        t.omega_lp_h,
        t.norm.value_db()
    );
    if input.fs.is_some() {
        line += &format!(", f_lp = {:.1} Hz", t.omega_lp / TAU);
    }
    println!("{line}");
    Ok(())
}

pub fn compare(input: &FilterInput, decimate: usize, from: f64, to: f64, points: usize, out: Option<&Path>) -> CliResult {
    let (tokens, carrier) = input.resolve()?;
    let stages = parse::stages(&tokens, carrier.as_ref())?;
    let ratios = log_sweep(from, to, points)?;
    let rows = compare_order(&stages, decimate, &ratios)?;
    let mut w = csv_sink(out)?;
    w.write_record(["omega_lp_over_omega_s", "rejection_after_db", "rejection_before_db"])?;
    for r in rows {
        w.write_record([
            r.omega_over_omega_s.to_string(),
            r.rejection_after_db.to_string(),
            r.rejection_before_db.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn preset_show(name: Option<&str>) -> CliResult {
    let list: Vec<&Preset> = match name {
        Some(n) => vec![preset::find(n).ok_or_else(|| CliError::usage(format!("unknown preset '{n}' (lcls2, ess)")))?],
        None => PRESETS.iter().collect(),
    };
    let text: Vec<String> = list.iter().map(|p| p.render()).collect();
    print!("{}", text.join("\n"));
    Ok(())
}

pub struct SimRequest {
    pub settings: SimSettings,
    /// Default low-pass bandwidth of the preset, in Hz, when requested.
    pub preset_lp_hz: Option<f64>,
    pub trace: Option<std::path::PathBuf>,
}

struct SimPlan {
    chain: Chain,
    spec: SignalSpec<f64>,
    samples: usize,
    seeds: usize,
    description: String,
}

fn plan(req: &SimRequest) -> CliResult<SimPlan> {
    let s = &req.settings;
    let ratio = s.carrier.as_deref().ok_or_else(|| CliError::usage("simulate needs --carrier, --preset or --config"))?;
    let carrier = parse::carrier(Some(ratio), s.fs)?.expect("carrier given");
    let tokens = parse::filter_spec(s.filter.as_deref().ok_or_else(|| CliError::usage("simulate needs --filter"))?)?;

    let mut h = Vec::new();
    let mut hp = s.hp;
    let mut lp_ratio = None;
    for &t in &tokens {
        match t {
            Token::Hp(p) => hp = Some(p),
            Token::Lp(r) => lp_ratio = Some(r),
            t => h.push(parse::stage(t, Some(&carrier))?),
        }
    }
    if s.dcr {
        h.push(make_dcr(&carrier)?);
    }
    if h.is_empty() {
        return Err(CliError::usage("simulate needs a DDC filter (ma:N, 2sr, dcr or iq)"));
    }
    lp_ratio = s.lp.or(lp_ratio);
    let lp_hz = s.lp_hz.or(req.preset_lp_hz);
    if lp_ratio.is_some() && lp_hz.is_some() {
        return Err(CliError::usage("give the low-pass bandwidth either as a ratio or in Hz"));
    }
    if let Some(f) = lp_hz {
        if s.fs.is_none() {
            return Err(CliError::usage("--lp-hz needs --fs"));
        }
        lp_ratio = Some(f / carrier.fs());
    }

    let decimate = s.decimate.unwrap_or(1);
    let order = s.order.unwrap_or(Order::FilterThenDecimate);
    let mut b = Chain::builder(carrier, Cascade::new(h)?.materialize()?);
    if let Some(p) = hp {
        b = b.pre_mixer(make_dc_reject_passband(p)?);
    }
    if let Some(r) = lp_ratio {
        b = b.lowpass_bandwidth(TAU * r * carrier.fs());
    }
    let chain = b.decimate(decimate, order).build()?;

    let mut spec = SignalSpec::new(parse::envelope(s.envelope.as_deref().unwrap_or("const:1"))?)
        .with_noise(s.noise.unwrap_or(0.0), s.seed.unwrap_or(0))
        .with_dc_offset(s.dc_offset.unwrap_or(0.0));
    for text in &s.harmonics {
        let hm = parse::harmonic(text)?;
        spec = spec.with_harmonic(hm.order, hm.amplitude);
    }

    let mut description = format!("filter {}", s.filter.as_deref().unwrap_or(""));
    if s.dcr {
        description += "+dcr";
    }
    if let Some(p) = hp {
        description += &format!(", pre-mixer hp {p}");
    }
    if let Some(r) = lp_ratio {
        description += &format!(", lp {r:.6} omega_s ({:.1} Hz)", r * carrier.fs());
    }
    if decimate > 1 {
        let o = match order {
            Order::FilterThenDecimate => "lp-first",
            Order::DecimateThenFilter => "decimate-first",
        };
        description += &format!(", decimate {decimate} ({o})");
    }
    Ok(SimPlan {
        chain,
        spec,
        samples: s.samples.unwrap_or(DEFAULT_SAMPLES),
        seeds: s.seeds.unwrap_or(1),
        description,
    })
}

fn print_report(plan: &SimPlan, r: &ExperimentReport<f64>) {
    let c = plan.chain.carrier();
    println!("carrier        {}/{}  fs {} Hz  fc {} Hz", c.m(), c.n(), c.fs(), c.fc());
    println!("chain          {}", plan.description);
    println!(
        "samples        {} input, {} evaluated after a transient of {}",
        plan.samples, r.evaluated_samples, r.settling_samples
    );
    println!("rms error      {:.6e}", r.rms_envelope_error);
    println!("spur           {:.6e} ({:.2} dB re |b|)", r.spur_magnitude, r.spur_level_db);
    match (r.noise_gain_empirical, r.noise_gain_stderr) {
        (Some(g), Some(se)) => println!(
            "noise gain     {g:.6} +/- {se:.6} (analytic {})",
            format_norm(&r.noise_gain_analytic)
        ),
        _ => println!("noise gain     analytic {}", format_norm(&r.noise_gain_analytic)),
    }
    println!(
        "delay          group {:.6e} s, hold {:.6e} s",
        plan.chain.group_delay(),
        plan.chain.hold_delay()
    );
}

fn write_trace(plan: &SimPlan, path: &Path) -> CliResult {
    let y = synthesize(&plan.spec, plan.chain.carrier(), plan.samples)?;
    let out = plan.chain.run(&y)?;
    let h = plan.chain.carrier().h();
    let mut w = csv_sink(Some(path))?;
    w.write_record(["k", "t_s", "out_re", "out_im", "env_re", "env_im"])?;
    for (j, z) in out.samples.samples().iter().enumerate() {
        let k = out.input_index(out.samples.start + j as i64);
        let b = plan.spec.envelope.at(k);
        w.write_record([
            k.to_string(),
            (k as f64 * h).to_string(),
            z.re.to_string(),
            z.im.to_string(),
            b.re.to_string(),
            b.im.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn simulate(req: &SimRequest) -> CliResult {
    let plan = plan(req)?;
    if plan.seeds <= 1 {
        let r = run_experiment(&plan.spec, &plan.chain, plan.samples)?;
        print_report(&plan, &r);
    } else {
        let first = plan.spec.seed;
        let seeds: Vec<u64> = (0..plan.seeds as u64).map(|i| first.wrapping_add(i)).collect();
        let sweep = run_seeds(&plan.spec, &plan.chain, plan.samples, &seeds)?;
        print_report(&plan, &sweep.reports[0]);
        println!(
            "seed sweep     {} seeds from {first}: mean gain {:.6} +/- {:.6}, analytic {:.6}, z = {:.2}",
            seeds.len(),
            sweep.noise_gain_mean,
            sweep.noise_gain_stderr,
            sweep.noise_gain_analytic.value,
            sweep.z_score()
        );
    }
    if let Some(path) = &req.trace {
        write_trace(&plan, path)?;
    }
    Ok(())
}
