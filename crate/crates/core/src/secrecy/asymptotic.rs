//! High-SNR approximation of the SOP: every conditional CDF of W1 is replaced
//! by the leading terms of its residue expansion, one power of the argument
//! per lower parameter. The smallest power, min(a, k1), sets the decay, so
//! the SOP falls by min(α/2, 1/2) decades per decade of μ1.

use std::f64::consts::{LN_2, PI};

use super::{mixture_sum, Kernel, SecrecyTarget, SopContext};
use crate::channel::CorrelatedLink;
use crate::error::Result;
use crate::numerics::SeriesNumerics;
use crate::specfun::gamma::ln_gamma;
use crate::specfun::meijer::{is_confluent, meijer_g_leading, MeijerParams};

/// Below this μ1 (in dB) the approximation is flagged as outside its regime.
pub const HIGH_SNR_DB: f64 = 35.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSop {
    pub value: f64,
    /// Predicted decades of SOP per decade of μ1.
    pub slope: f64,
    pub terms_used: usize,
    pub warnings: Vec<String>,
    /// Some leading coefficient had a Γ pole and was regularized by ±ε.
    pub confluent_regularized: bool,
}

/// min(α/2, 1/2).
pub fn asymptotic_slope(alpha: f64) -> f64 {
    (0.5 * alpha).min(0.5)
}

fn lower_params(a: f64, k: usize) -> (f64, [f64; 5]) {
    let kf = k as f64;
    let v = a - kf;
    let s = 0.25 * (a + kf);
    (s, [0.25 * v, 0.25 * (v + 2.0), -0.25 * v, 0.25 * (2.0 - v), -s])
}

/// Leading-term approximation of P(X'Y' <= x), X' ~ Gamma(a), Y' ~ Gamma(k).
pub(crate) fn leading_cdf(a: f64, k: usize, x: f64, epsilon_shift: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let (s, b) = lower_params(a, k);
    let params = MeijerParams::with_epsilon(4, 1, &[1.0 - s], &b, epsilon_shift)?;
    let big_x = x * x / 16.0;
    let g = meijer_g_leading(&params, big_x)?;
    let kf = k as f64;
    let ln_pref = (a + kf - 2.0) * LN_2 - PI.ln() - ln_gamma(a)? - ln_gamma(kf)?;
    Ok(g.sign * (ln_pref + s * big_x.ln() + g.ln_abs).exp())
}

/// Asymptotic SOP and its slope.
pub fn sop_asymptotic(link: &CorrelatedLink, target: &SecrecyTarget, num: &SeriesNumerics) -> Result<AsymptoticSop> {
    num.validate()?;
    let mut warnings = Vec::new();
    let mu1_db = 10.0 * link.mu1().log10();
    if mu1_db < HIGH_SNR_DB {
        warnings.push(format!(
            "mu1 = {mu1_db:.1} dB is below {HIGH_SNR_DB} dB; the high-SNR approximation may be poor"
        ));
    }
    let ctx = SopContext::new(link, target, num, Kernel::Leading);
    let (value, terms, _, _) = mixture_sum(link, num, |t| ctx.block(t, num.quad_order))?;
    let alpha = link.params().alpha();
    let beta = link.params().beta() as usize;
    let confluent_regularized = (0..terms.len())
        .any(|t| (1..=beta).any(|k| is_confluent(4, &lower_params(alpha + t as f64, k).1)));
    if confluent_regularized {
        warnings.push("confluent leading coefficients regularized by epsilon splitting".to_string());
    }
    Ok(AsymptoticSop {
        value,
        slope: asymptotic_slope(alpha),
        terms_used: terms.len(),
        warnings,
        confluent_regularized,
    })
}
