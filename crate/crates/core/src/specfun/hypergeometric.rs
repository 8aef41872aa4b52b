//! Generalized hypergeometric series pFq(a; b; z).

use crate::error::{Error, Result};
use crate::specfun::gamma::CompensatedSum;

const MAX_TERMS: usize = 200_000;

/// Value of a series together with the sum of the absolute values of its
/// terms; their ratio bounds the cancellation that took place.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    pub magnitude: f64,
    pub terms: usize,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// pFq by direct summation. Stops once the running term has been below
/// 1e-17 of the running sum for three consecutive steps while shrinking.
pub fn hyp_pfq_series(a: &[f64], b: &[f64], z: f64) -> Result<SeriesValue> {
    if let Some(&bad) = b.iter().find(|&&x| is_nonpositive_integer(x)) {
        return Err(Error::Pole(bad));
    }
    // polynomial case: terminates at the smallest |a_i| among non-positive integers
    let terminate = a
        .iter()
        .filter(|&&x| is_nonpositive_integer(x))
        .map(|&x| (-x) as usize)
        .min();
    if z == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            magnitude: 1.0,
            terms: 1,
        });
    }
    if terminate.is_none() {
        let p = a.len();
        let q = b.len();
        if p > q + 1 {
            return Err(Error::no_convergence(
                "hyp_pfq",
                format!("{p}F{q} diverges for z != 0"),
            ));
        }
        if p == q + 1 && z.abs() >= 1.0 {
            return Err(Error::no_convergence(
                "hyp_pfq",
                format!("{p}F{q} series diverges for |z| = {} >= 1", z.abs()),
            ));
        }
    }
    let mut sum = CompensatedSum::new();
    let mut term = 1.0f64;
    sum.add(term);
    let mut small = 0;
    for n in 0..MAX_TERMS {
        if let Some(m) = terminate {
            if n >= m {
                return Ok(SeriesValue {
                    value: sum.value(),
                    magnitude: sum.magnitude(),
                    terms: n + 1,
                });
            }
        }
        let nf = n as f64;
        let mut ratio = z / (nf + 1.0);
        for &ai in a {
            ratio *= ai + nf;
        }
        for &bj in b {
            ratio /= bj + nf;
        }
        let prev = term.abs();
        term *= ratio;
        if !term.is_finite() {
            return Err(Error::no_convergence(
                "hyp_pfq",
                format!("term overflow at n = {n}"),
            ));
        }
        sum.add(term);
        if term.abs() <= 1e-17 * sum.value().abs() && term.abs() <= prev {
            small += 1;
            if small >= 3 {
                return Ok(SeriesValue {
                    value: sum.value(),
                    magnitude: sum.magnitude(),
                    terms: n + 2,
                });
            }
        } else {
            small = 0;
        }
        if term == 0.0 {
            return Ok(SeriesValue {
                value: sum.value(),
                magnitude: sum.magnitude(),
                terms: n + 2,
            });
        }
    }
    Err(Error::no_convergence(
        "hyp_pfq",
        format!("no convergence after {MAX_TERMS} terms (partial {:e})", sum.value()),
    ))
}

/// pFq(a; b; z).
pub fn hyp_pfq(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    hyp_pfq_series(a, b, z).map(|s| s.value)
}
