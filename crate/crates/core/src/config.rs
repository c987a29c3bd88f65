//! Flat key–value model configuration.
//!
//! One model per named section, dotted keys for the measure parameters:
//!
//! ```text
//! [modelA]
//! drift = 1.0
//! a = 0.0
//! z.family = exponential
//! z.rate = 0.5
//! z.theta = 1.0
//! c.family = exponential
//! c.rate = 0.3
//! c.theta = 2.0
//! ```
//!
//! Families and their keys:
//!
//! * `exponential`: `rate`, `theta`
//! * `gamma`: `alpha`, `beta`
//! * `truncstable`: `scale`, `index`, `cutoff`
//! * `atom`: `location`, `mass`
//! * `sum`: `count` plus nested `1.family`, `1.rate`, … per component
//! * `none`: explicitly absent (only meaningful for `c`)
//!
//! Any measure prefix may carry `truncate = <threshold>` to restrict it to
//! jumps above the threshold. `#` starts a comment; blank lines are ignored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::JumpMeasure;
use crate::process::ProcessSpec;

/// Parses every `[section]` of the config text into a named spec.
pub fn parse_models(text: &str) -> Result<BTreeMap<String, ProcessSpec>> {
    let sections = split_sections(text)?;
    let mut out = BTreeMap::new();
    for (name, kv) in sections {
        let spec = spec_from_pairs(&kv)
            .map_err(|e| Error::config(format!("model [{name}]: {e}")))?;
        out.insert(name, spec);
    }
    Ok(out)
}

fn split_sections(text: &str) -> Result<Vec<(String, BTreeMap<String, String>)>> {
    let mut sections: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::config(format!("line {}: empty section name", lineno + 1)));
            }
            sections.push((name.to_string(), BTreeMap::new()));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)));
        };
        let Some((_, kv)) = sections.last_mut() else {
            return Err(Error::config(format!(
                "line {}: key `{}` appears before any [section]",
                lineno + 1,
                key.trim()
            )));
        };
        kv.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(sections)
}

/// Builds a spec from one section's key–value pairs.
pub fn spec_from_pairs(kv: &BTreeMap<String, String>) -> Result<ProcessSpec> {
    let drift = required_number(kv, "drift")?;
    let diffusion = optional_number(kv, "a")?.unwrap_or(0.0);
    let z = parse_measure(kv, "z")?
        .ok_or_else(|| Error::config("missing z measure (`z.family = ...`)"))?;
    let c = parse_measure(kv, "c")?;
    ProcessSpec::with_diffusion(drift, z, c, diffusion)
        .map_err(|e| Error::config(e.to_string()))
}

fn parse_measure(kv: &BTreeMap<String, String>, prefix: &str) -> Result<Option<JumpMeasure>> {
    let family_key = format!("{prefix}.family");
    let Some(family) = kv.get(&family_key) else {
        // No keys for this prefix at all means the measure is absent.
        if kv.keys().any(|k| k.starts_with(&format!("{prefix}."))) {
            return Err(Error::config(format!("missing `{family_key}`")));
        }
        return Ok(None);
    };
    let base = match family.as_str() {
        "none" => return Ok(None),
        "exponential" => JumpMeasure::exponential(
            prefixed_number(kv, prefix, "rate")?,
            prefixed_number(kv, prefix, "theta")?,
        )?,
        "gamma" => JumpMeasure::gamma(
            prefixed_number(kv, prefix, "alpha")?,
            prefixed_number(kv, prefix, "beta")?,
        )?,
        "truncstable" => JumpMeasure::truncated_stable(
            prefixed_number(kv, prefix, "scale")?,
            prefixed_number(kv, prefix, "index")?,
            prefixed_number(kv, prefix, "cutoff")?,
        )?,
        "atom" => JumpMeasure::atom(
            prefixed_number(kv, prefix, "location")?,
            prefixed_number(kv, prefix, "mass")?,
        )?,
        "sum" => {
            let count = prefixed_number(kv, prefix, "count")? as usize;
            if count == 0 {
                JumpMeasure::zero()
            } else {
                let mut parts = Vec::with_capacity(count);
                for i in 1..=count {
                    let sub = format!("{prefix}.{i}");
                    let part = parse_measure(kv, &sub)?
                        .ok_or_else(|| Error::config(format!("missing `{sub}.family`")))?;
                    parts.push(part);
                }
                JumpMeasure::sum(parts)
            }
        }
        other => {
            return Err(Error::config(format!(
                "unknown family `{other}` for `{family_key}` \
                 (expected exponential|gamma|truncstable|atom|sum|none)"
            )))
        }
    };
    match optional_number_key(kv, &format!("{prefix}.truncate"))? {
        Some(thr) => Ok(Some(base.truncated(thr).map_err(|e| Error::config(e.to_string()))?)),
        None => Ok(Some(base)),
    }
}

fn required_number(kv: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    optional_number(kv, key)?.ok_or_else(|| Error::config(format!("missing `{key}`")))
}

fn optional_number(kv: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    optional_number_key(kv, key)
}

fn optional_number_key(kv: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    match kv.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::config(format!("`{key}`: not a number: `{raw}`"))),
    }
}

fn prefixed_number(kv: &BTreeMap<String, String>, prefix: &str, key: &str) -> Result<f64> {
    required_number(kv, &format!("{prefix}.{key}"))
}
