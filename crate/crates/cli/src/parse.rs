//! Small text grammars: filter specs, carriers, complex numbers, envelopes
//! and harmonics.

use std::f64::consts::TAU;

use ddc_core::filters::{make_2sr, make_dc_reject_passband, make_dcr, make_iq, make_lp, make_ma, to_baseband};
use ddc_core::simulator::{Envelope, Harmonic};
use ddc_core::{Carrier, Filter, C64};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Token {
    Ma(usize),
    TwoSample,
    Dcr,
    Iq,
    /// Low-pass bandwidth as `omega_lp / omega_s`.
    Lp(f64),
    /// Pre-mixer high-pass pole.
    Hp(f64),
}

/// `ma:N`, `2sr`, `dcr`, `iq`, `lp:<omega_lp/omega_s>`, `hp:<p>` joined by `+`.
pub fn filter_spec(spec: &str) -> CliResult<Vec<Token>> {
    if spec.trim().is_empty() {
        return Err(CliError::usage("empty filter spec"));
    }
    spec.split('+').map(|t| token(t.trim(), spec)).collect()
}

fn token(t: &str, spec: &str) -> CliResult<Token> {
    let bad = || CliError::usage(format!("bad filter token '{t}' in '{spec}'"));
    let (name, arg) = match t.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (t, None),
    };
    let num = |a: Option<&str>| a.and_then(|a| a.parse::<f64>().ok()).filter(|v| v.is_finite()).ok_or_else(bad);
    Ok(match (name.to_ascii_lowercase().as_str(), arg) {
        ("ma", Some(a)) => Token::Ma(a.parse().map_err(|_| bad())?),
        ("2sr", None) => Token::TwoSample,
        ("dcr", None) => Token::Dcr,
        ("iq", None) => Token::Iq,
        ("lp", a @ Some(_)) => Token::Lp(num(a)?),
        ("hp", a @ Some(_)) => Token::Hp(num(a)?),
        _ => return Err(bad()),
    })
}

fn need<'a>(carrier: Option<&'a Carrier>, t: &str) -> CliResult<&'a Carrier> {
    carrier.ok_or_else(|| CliError::usage(format!("filter token '{t}' needs --carrier M/N")))
}

/// Baseband stage for one token; low-pass bandwidths are taken per input
/// sample (`h = 1`).
pub fn stage(t: Token, carrier: Option<&Carrier>) -> CliResult<Filter> {
    Ok(match t {
        Token::Ma(n) => make_ma(n)?,
        Token::TwoSample => make_2sr(need(carrier, "2sr")?)?,
        Token::Dcr => make_dcr(need(carrier, "dcr")?)?,
        Token::Iq => make_iq(need(carrier, "iq")?)?,
        Token::Lp(r) => make_lp(TAU * r, 1.0)?,
        Token::Hp(p) => to_baseband(&make_dc_reject_passband(p)?, need(carrier, "hp")?)?,
    })
}

pub fn stages(tokens: &[Token], carrier: Option<&Carrier>) -> CliResult<Vec<Filter>> {
    tokens.iter().map(|&t| stage(t, carrier)).collect()
}

pub fn carrier_ratio(s: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::usage(format!("carrier must be M/N with positive integers, got '{s}'"));
    let (m, n) = s.split_once('/').ok_or_else(bad)?;
    Ok((m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

pub fn carrier(ratio: Option<&str>, fs: Option<f64>) -> CliResult<Option<Carrier>> {
    match ratio {
        None if fs.is_some() => Err(CliError::usage("--fs needs --carrier M/N")),
        None => Ok(None),
        Some(r) => {
            let (m, n) = carrier_ratio(r)?;
            Ok(Some(Carrier::new(m, n, fs.unwrap_or(1.0))?))
        }
    }
}

/// `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`).
pub fn complex(s: &str) -> CliResult<C64> {
    let bad = || CliError::usage(format!("bad complex number '{s}'"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z = match t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        None => C64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(i) => (&body[..i], &body[i..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => 1.0,
                "-" => -1.0,
                v => v.parse::<f64>().map_err(|_| bad())?,
            };
            C64::new(re.parse::<f64>().map_err(|_| bad())?, im)
        }
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// `const:B`, `step:B0,B1,K` or `ramp:B,RATE` (RATE in rad/sample).
pub fn envelope(s: &str) -> CliResult<Envelope<f64>> {
    let bad = || CliError::usage(format!("bad envelope '{s}' (const:B, step:B0,B1,K or ramp:B,RATE)"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(',').collect();
    Ok(match (kind, parts.as_slice()) {
        ("const", [b]) => Envelope::Constant(complex(b)?),
        ("step", [b0, b1, k]) => Envelope::Step {
            before: complex(b0)?,
            after: complex(b1)?,
            at: k.trim().parse().map_err(|_| bad())?,
        },
        ("ramp", [b, rate]) => Envelope::RampPhase {
            start: complex(b)?,
            rate: rate.trim().parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    })
}

/// `ORDER:AMPLITUDE`, amplitude possibly complex.
pub fn harmonic(s: &str) -> CliResult<Harmonic<f64>> {
    let (m, a) = s
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("harmonic must be ORDER:AMPLITUDE, got '{s}'")))?;
    let order = m.trim().parse().map_err(|_| CliError::usage(format!("bad harmonic order in '{s}'")))?;
    Ok(Harmonic { order, amplitude: complex(a)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_tokens() {
        assert_eq!(filter_spec("ma:11").unwrap(), vec![Token::Ma(11)]);
        assert_eq!(
            filter_spec("hp:0.9375+2sr+dcr+lp:0.01").unwrap(),
            vec![Token::Hp(0.9375), Token::TwoSample, Token::Dcr, Token::Lp(0.01)]
        );
        let err = filter_spec("ma:3+bogus").unwrap_err().to_string();
        assert!(err.contains("'bogus'"), "{err}");
        assert!(filter_spec("ma:x").is_err());
        assert!(filter_spec("2sr:3").is_err());
        assert!(filter_spec("lp").is_err());
        assert!(filter_spec("").is_err());
    }

    #[test]
    fn carrier_needed_for_carrier_filters() {
        let t = filter_spec("2sr").unwrap();
        assert!(matches!(stages(&t, None), Err(CliError::Usage(_))));
        let c = Carrier::normalized(7, 33).unwrap();
        assert_eq!(stages(&t, Some(&c)).unwrap().len(), 1);
        assert!(carrier(None, Some(1e6)).is_err());
        assert!(carrier(Some("7-33"), None).is_err());
        assert!(matches!(carrier(Some("20/33"), None), Err(CliError::Usage(_))));
    }

    #[test]
    fn complex_numbers() {
        assert_eq!(complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(complex("1-2i").unwrap(), C64::new(1.0, -2.0));
        assert_eq!(complex("-0.5").unwrap(), C64::new(-0.5, 0.0));
        assert_eq!(complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(complex("1e-3+2e-3i").unwrap(), C64::new(1e-3, 2e-3));
        assert_eq!(complex("-1e+2-1e-2i").unwrap(), C64::new(-100.0, -0.01));
        assert!(complex("1+2").is_err());
        assert!(complex("abc").is_err());
        assert!(complex("nan").is_err());
    }

    #[test]
    fn envelopes_and_harmonics() {
        assert_eq!(envelope("const:1+2i").unwrap(), Envelope::Constant(C64::new(1.0, 2.0)));
        assert!(matches!(envelope("step:0,1,100").unwrap(), Envelope::Step { at: 100, .. }));
        assert!(matches!(envelope("ramp:1,1e-5").unwrap(), Envelope::RampPhase { .. }));
        assert!(envelope("square:1").is_err());
        let h = harmonic("3:0.01").unwrap();
        assert_eq!((h.order, h.amplitude), (3, C64::new(0.01, 0.0)));
        assert!(harmonic("3").is_err());
    }
}
