//! Flat `key = value` configuration text with `#` comments.

use std::collections::BTreeMap;

use crate::error::{CliError, CliResult};

/// Keys accepted in a config file; the same names as the long flags, with
/// `-` and `_` interchangeable.
pub const KEYS: &[&str] = &[
    "preset",
    "alpha",
    "beta",
    "b0",
    "delta",
    "omega",
    "omega1",
    "omega_prime",
    "phi_a",
    "phi_b",
    "mu1_db",
    "mu2_db",
    "rho",
    "rs",
    "rs_unit",
    "t_max",
    "rel_tol",
    "quad_order",
    "denominator",
    "samples",
    "seed",
    "out",
    "gamma1",
    "gamma2",
];

pub fn canonical_key(k: &str) -> String {
    k.trim().replace('-', "_").to_ascii_lowercase()
}

/// Parse config text into an ordered map. Later duplicates are an error.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::invalid("config", format!("line {}: expected key = value", n + 1)))?;
        let key = canonical_key(k);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::invalid("config", format!("line {}: unknown key {key:?}", n + 1)));
        }
        let value = v.trim();
        if value.is_empty() {
            return Err(CliError::invalid("config", format!("line {}: empty value for {key}", n + 1)));
        }
        if map.insert(key.clone(), value.to_string()).is_some() {
            return Err(CliError::invalid("config", format!("line {}: duplicate key {key}", n + 1)));
        }
    }
    Ok(map)
}

/// Inverse of [`parse_config`].
pub fn render_config(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
