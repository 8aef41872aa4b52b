//! Secrecy metrics of the correlated wiretap link: exact and asymptotic
//! secrecy outage probability (SOP) and the probability of non-zero secrecy
//! capacity (PNZSC).
//!
//! Conditioned on the mixture index t and the small-scale indices (k1, k2),
//! W_p = X'_p Y'_p is a product of independent Gamma(a = α + t) and
//! Gamma(k_p) variables and γ_p = μ_p (W_p/λ)². The outage event becomes
//! W1 <= λ√((Θ(1 + γ2) − 1)/μ1), so each conditional SOP is an expectation
//! over W2 of the product CDF of W1.

mod asymptotic;
pub mod engine;

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::channel::CorrelatedLink;
use crate::channel::{density::ln_kibble_weight, density::log_add, density::Truncation};
use crate::error::{Error, Result};
use crate::numerics::SeriesNumerics;
use crate::specfun::gamma::ln_gamma;
use crate::specfun::meijer::{gamma_product_cdf_all, meijer_g_eval, MeijerParams};

pub use asymptotic::{sop_asymptotic, AsymptoticSop, HIGH_SNR_DB};
use engine::{route_for, w_nodes, Route};

/// Allowed excursion of a raw probability outside [0, 1] before it is an error.
pub const CLAMP_SLACK: f64 = 1e-9;

/// Number of mixture terms evaluated per parallel batch.
const BATCH: usize = 16;

/// Target secrecy rate in nats per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyTarget {
    rs: f64,
}

impl SecrecyTarget {
    pub fn new(rs: f64) -> Result<Self> {
        if !(rs >= 0.0) || !rs.is_finite() {
            return Err(Error::invalid("rs", format!("must be finite and non-negative, got {rs}")));
        }
        Ok(SecrecyTarget { rs })
    }

    pub fn from_bits(bits: f64) -> Result<Self> {
        Self::new(bits * LN_2)
    }

    pub fn rs(&self) -> f64 {
        self.rs
    }

    /// Θ = e^{Rs}.
    pub fn theta(&self) -> f64 {
        self.rs.exp()
    }
}

/// Instantaneous secrecy rate [ln(1 + γ1) − ln(1 + γ2)]⁺ in nats.
pub fn secrecy_rate(g1: f64, g2: f64) -> f64 {
    (g1.ln_1p() - g2.ln_1p()).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SopDiagnostics {
    /// Contribution of each mixture term t = 0, 1, ...
    pub term_magnitudes: Vec<f64>,
    /// |dominant term at order L − same term at order min(2L, 64)|.
    pub quadrature_residual: f64,
    /// (t, k2) blocks integrated by the half-range rule.
    pub half_range_blocks: usize,
    /// (t, k2) blocks integrated by the tensor Gamma rule.
    pub product_blocks: usize,
    /// Raw value before the bounded clamp.
    pub raw_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SopResult {
    pub value: f64,
    /// Mixture terms summed.
    pub terms_used: usize,
    pub diagnostics: SopDiagnostics,
}

/// Clamp to [0, 1] when within [`CLAMP_SLACK`]; larger excursions are errors.
pub fn clamp_probability(raw: f64) -> Result<f64> {
    if !raw.is_finite() || !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&raw) {
        return Err(Error::OutOfRange(raw));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Inner CDF used for W1: exact, or the leading small-argument terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    Exact,
    Leading,
}

/// Shared per-link state of the conditional SOP terms.
pub(crate) struct SopContext<'a> {
    pub(crate) link: &'a CorrelatedLink,
    pub(crate) num: &'a SeriesNumerics,
    theta: f64,
    theta_m1: f64,
    lambda: f64,
    w: Vec<f64>,
    pub(crate) kernel: Kernel,
}

impl<'a> SopContext<'a> {
    pub(crate) fn new(link: &'a CorrelatedLink, target: &SecrecyTarget, num: &'a SeriesNumerics, kernel: Kernel) -> Self {
        SopContext {
            link,
            num,
            theta: target.theta(),
            theta_m1: target.rs().exp_m1(),
            lambda: link.lambda(),
            w: link.params().ln_mixture_weights().iter().map(|l| l.exp()).collect(),
            kernel,
        }
    }

    /// Threshold on W1 given W2.
    fn threshold(&self, w2: f64) -> f64 {
        let r = w2 / self.lambda;
        let y = self.theta_m1 + self.theta * self.link.mu2() * r * r;
        self.lambda * (y / self.link.mu1()).sqrt()
    }

    /// Σ_{k1} w_{k1} P(W1 <= x | a, k1).
    fn inner(&self, a: f64, x: f64) -> Result<f64> {
        match self.kernel {
            Kernel::Exact => {
                let cdf = gamma_product_cdf_all(a, self.w.len(), x)?;
                Ok(self.w.iter().zip(&cdf).map(|(w, c)| w * c).sum())
            }
            Kernel::Leading => {
                let mut s = 0.0;
                for (i, w) in self.w.iter().enumerate() {
                    s += w * asymptotic::leading_cdf(a, i + 1, x, self.num.epsilon_shift)?;
                }
                Ok(s)
            }
        }
    }

    /// Conditional SOP given t, with the rule order used for W2.
    pub(crate) fn block(&self, t: usize, order: usize) -> Result<(f64, usize, usize)> {
        let a = self.link.params().alpha() + t as f64;
        let mut total = 0.0;
        let (mut half, mut prod) = (0, 0);
        for (i, w2) in self.w.iter().enumerate() {
            if *w2 == 0.0 {
                continue;
            }
            let k2 = i + 1;
            let route = route_for(a, k2);
            match route {
                Route::HalfRange => half += 1,
                Route::Product => prod += 1,
            }
            let mut e = 0.0;
            for (w, p) in w_nodes(a, k2, route, order, self.num)? {
                e += p * self.inner(a, self.threshold(w))?;
            }
            total += w2 * e;
        }
        Ok((total, half, prod))
    }
}

/// Σ_t π_t S_t with the truncation rule, evaluated in parallel batches.
/// Returns (sum, per-term values, route counts).
pub(crate) fn mixture_sum<F>(link: &CorrelatedLink, num: &SeriesNumerics, term: F) -> Result<(f64, Vec<f64>, usize, usize)>
where
    F: Fn(usize) -> Result<(f64, usize, usize)> + Sync,
{
    let alpha = link.params().alpha();
    let rho = link.rho();
    if rho == 0.0 {
        // independent links: the t = 0 term with unit weight
        let (s, h, p) = term(0)?;
        return Ok((s, vec![s], h, p));
    }
    let mut stop = Truncation::new(num.rel_tol, alpha, rho);
    let mut ln_sum = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut terms = Vec::new();
    let (mut half, mut prod) = (0, 0);
    let mut t0 = 0;
    while t0 <= num.t_max {
        let t1 = (t0 + BATCH).min(num.t_max + 1);
        let batch: Vec<Result<(f64, usize, usize)>> = (t0..t1)
            .into_par_iter()
            .map(|t| {
                let ln_pi = ln_kibble_weight(alpha, rho, t, num.denominator)?;
                if ln_pi == f64::NEG_INFINITY {
                    return Ok((0.0, 0, 0));
                }
                let (s, h, p) = term(t)?;
                Ok((ln_pi.exp() * s, h, p))
            })
            .collect();
        for (i, r) in batch.into_iter().enumerate() {
            let (v, h, p) = r?;
            let t = t0 + i;
            terms.push(v);
            sum += v;
            half += h;
            prod += p;
            let ln_v = if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
            ln_sum = log_add(ln_sum, ln_v);
            if stop.push(t, ln_v, ln_sum) {
                return Ok((sum, terms, half, prod));
            }
        }
        t0 = t1;
    }
    Err(Error::Truncated {
        terms: num.t_max,
        partial: sum,
    })
}

fn residual<F>(link: &CorrelatedLink, num: &SeriesNumerics, terms: &[f64], eval: F) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<(f64, usize, usize)>,
{
    let Some((t, _)) = terms.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return Ok(0.0);
    };
    let hi = (2 * num.quad_order).min(crate::specfun::quadrature::MAX_ORDER);
    if hi == num.quad_order {
        return Ok(0.0);
    }
    let ln_pi = if link.rho() == 0.0 {
        0.0
    } else {
        ln_kibble_weight(link.params().alpha(), link.rho(), t, num.denominator)?
    };
    let (a, _, _) = eval(t, num.quad_order)?;
    let (b, _, _) = eval(t, hi)?;
    Ok(ln_pi.exp() * (a - b).abs())
}

/// Exact secrecy outage probability Pr[γ1 <= Θγ2 + Θ − 1].
pub fn sop_exact(link: &CorrelatedLink, target: &SecrecyTarget, num: &SeriesNumerics) -> Result<SopResult> {
    num.validate()?;
    let ctx = SopContext::new(link, target, num, Kernel::Exact);
    let (raw, terms, half, prod) = mixture_sum(link, num, |t| ctx.block(t, num.quad_order))?;
    let quadrature_residual = residual(link, num, &terms, |t, o| ctx.block(t, o))?;
    Ok(SopResult {
        value: clamp_probability(raw)?,
        terms_used: terms.len(),
        diagnostics: SopDiagnostics {
            term_magnitudes: terms,
            quadrature_residual,
            half_range_blocks: half,
            product_blocks: prod,
            raw_value: raw,
        },
    })
}

/// Parameters of the G^{4,5}_{5,5} kernel of P(W1 < √R·W2), R = μ2/μ1, for
/// shapes (a, k1) and (a, k2).
pub fn pnzsc_kernel_params(a: f64, k1: usize, k2: usize, epsilon_shift: f64) -> Result<MeijerParams> {
    let (k1, k2) = (k1 as f64, k2 as f64);
    let v = a - k1;
    let upper = [
        (4.0 - 3.0 * a - k1) / 4.0,
        (2.0 - 3.0 * a - k1) / 4.0,
        (4.0 - a - k1 - 2.0 * k2) / 4.0,
        (2.0 - a - k1 - 2.0 * k2) / 4.0,
        (4.0 - a - k1) / 4.0,
    ];
    let lower = [v / 4.0, (v + 2.0) / 4.0, -v / 4.0, (2.0 - v) / 4.0, -(a + k1) / 4.0];
    MeijerParams::with_epsilon(4, 5, &upper, &lower, epsilon_shift)
}

/// P(W1 < √R·W2) through the G^{4,5}_{5,5} kernel.
pub fn pnzsc_kernel(a: f64, k1: usize, k2: usize, ratio: f64, epsilon_shift: f64) -> Result<f64> {
    let params = pnzsc_kernel_params(a, k1, k2, epsilon_shift)?;
    let g = meijer_g_eval(&params, ratio)?;
    if g.sign < 0.0 {
        return Err(Error::no_convergence("pnzsc kernel", format!("negative G at a={a}, k1={k1}, k2={k2}")));
    }
    let (f1, f2) = (k1 as f64, k2 as f64);
    let ln_pref = (2.0 * a + f1 + f2 - 4.0) * LN_2 - 2.0 * PI.ln() - 2.0 * ln_gamma(a)? - ln_gamma(f1)? - ln_gamma(f2)?;
    Ok((ln_pref + 0.25 * (a + f1) * ratio.ln() + g.ln_abs).exp())
}

/// Exact probability of non-zero secrecy capacity Pr[γ1 > γ2].
pub fn pnzsc_exact(link: &CorrelatedLink, num: &SeriesNumerics) -> Result<SopResult> {
    num.validate()?;
    let w: Vec<f64> = link.params().ln_mixture_weights().iter().map(|l| l.exp()).collect();
    let ratio = link.mu2() / link.mu1();
    let alpha = link.params().alpha();
    let (sum, terms, _, _) = mixture_sum(link, num, |t| {
        let a = alpha + t as f64;
        let mut q = 0.0;
        for (i, w1) in w.iter().enumerate() {
            for (j, w2) in w.iter().enumerate() {
                if w1 * w2 == 0.0 {
                    continue;
                }
                q += w1 * w2 * pnzsc_kernel(a, i + 1, j + 1, ratio, num.epsilon_shift)?;
            }
        }
        Ok((q, 0, 0))
    })?;
    let raw = 1.0 - sum;
    Ok(SopResult {
        value: clamp_probability(raw)?,
        terms_used: terms.len(),
        diagnostics: SopDiagnostics {
            term_magnitudes: terms,
            raw_value: raw,
            ..Default::default()
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRho {
    pub rho_star: f64,
    /// (ρ, SOP) in grid order.
    pub sop_curve: Vec<(f64, f64)>,
}

/// SOP across a ρ grid and its maximizer.
pub fn critical_rho(
    link: &CorrelatedLink,
    target: &SecrecyTarget,
    num: &SeriesNumerics,
    grid: &[f64],
) -> Result<CriticalRho> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "needs at least one ρ value"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid", "must be strictly increasing"));
    }
    let links = grid.iter().map(|&r| link.with_rho(r)).collect::<Result<Vec<_>>>()?;
    let values = links
        .par_iter()
        .map(|l| sop_exact(l, target, num).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let sop_curve: Vec<(f64, f64)> = grid.iter().copied().zip(values).collect();
    let rho_star = sop_curve
        .iter()
        .fold((grid[0], f64::NEG_INFINITY), |best, &(r, v)| if v > best.1 { (r, v) } else { best })
        .0;
    Ok(CriticalRho { rho_star, sop_curve })
}

/// Strictly rises to an interior maximum, then strictly falls.
pub fn is_up_down(values: &[f64]) -> bool {
    if values.len() < 3 {
        return false;
    }
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if peak == 0 || peak == values.len() - 1 {
        return false;
    }
    values[..=peak].windows(2).all(|w| w[0] < w[1]) && values[peak..].windows(2).all(|w| w[0] > w[1])
}
