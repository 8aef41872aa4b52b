//! `v` or `start:stop:step` value lists.

use crate::error::{CliError, CliResult};

pub const MAX_POINTS: usize = 100_000;

/// Round away accumulated step error so that 0.1 + 2·0.05 prints as 0.2.
fn tidy(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(12 - x.abs().log10().ceil() as i32);
    (x * scale).round() / scale
}

fn number(field: &str, s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::invalid(field, format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(CliError::invalid(field, format!("not finite: {s:?}")));
    }
    Ok(v)
}

/// Parse a single value or an inclusive `start:stop:step` range.
pub fn parse_range(field: &str, s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![number(field, v)?]),
        [a, b, c] => {
            let (start, stop, step) = (number(field, a)?, number(field, b)?, number(field, c)?);
            if !(step > 0.0) {
                return Err(CliError::invalid(field, "step must be positive"));
            }
            if stop < start {
                return Err(CliError::invalid(field, "stop is below start"));
            }
            let span = (stop - start) / step;
            if span >= MAX_POINTS as f64 {
                return Err(CliError::invalid(field, format!("more than {MAX_POINTS} points")));
            }
            let n = (span + 1e-9).floor() as usize + 1;
            Ok((0..n).map(|i| tidy(start + i as f64 * step)).collect())
        }
        _ => Err(CliError::invalid(field, format!("expected v or start:stop:step, got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        assert_eq!(parse_range("rho", "0.5").unwrap(), vec![0.5]);
    }

    #[test]
    fn inclusive_range() {
        let v = parse_range("mu1_db", "30:70:5").unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[8], 70.0);
        let r = parse_range("rho", "0:0.95:0.05").unwrap();
        assert_eq!(r.len(), 20);
        assert_eq!(r[3], 0.15);
        assert_eq!(r[19], 0.95);
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "a", "1:2", "1:2:0", "2:1:1", "1:2:3:4", "nan", "0:1e9:1e-3"] {
            assert!(parse_range("x", s).is_err(), "{s}");
        }
    }
}
