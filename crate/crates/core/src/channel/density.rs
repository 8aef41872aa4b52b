use std::f64::consts::LN_2;

use super::{mixture_mode, CorrelatedLink, MalagaParams};
use crate::error::{Error, Result};
use crate::numerics::{DenominatorConvention, SeriesNumerics};
use crate::specfun::bessel::ln_bessel_k_seq;
use crate::specfun::gamma::ln_gamma;

/// ln of the t-th Kibble mixture weight Γ(α+t)/(Γ(α)·D_t)·(1−ρ²)^α·ρ^{2t},
/// D_t = t! or Γ(t).
pub(crate) fn ln_kibble_weight(alpha: f64, rho: f64, t: usize, conv: DenominatorConvention) -> Result<f64> {
    let tf = t as f64;
    let r2 = rho * rho;
    let ln_rho_pow = if t == 0 { 0.0 } else { 2.0 * tf * rho.ln() };
    let ln_den = match conv {
        DenominatorConvention::FactorialT => ln_gamma(tf + 1.0)?,
        DenominatorConvention::GammaT => {
            if t == 0 {
                return Ok(f64::NEG_INFINITY);
            }
            ln_gamma(tf)?
        }
    };
    Ok(ln_gamma(alpha + tf)? - ln_gamma(alpha)? - ln_den + alpha * (-r2).ln_1p() + ln_rho_pow)
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Stopping rule for the mixture series: three consecutive terms each below
/// rel_tol of the running sum, past the mode of the mixture weights and while
/// the terms are not growing.
pub(crate) struct Truncation {
    ln_tol: f64,
    mode: usize,
    small: usize,
    prev: f64,
}

impl Truncation {
    pub(crate) fn new(rel_tol: f64, alpha: f64, rho: f64) -> Self {
        Truncation {
            ln_tol: rel_tol.ln(),
            mode: mixture_mode(alpha, rho),
            small: 0,
            prev: f64::INFINITY,
        }
    }

    /// Feed term t (log scale) and the running sum including it; true once
    /// the series may stop.
    pub(crate) fn push(&mut self, t: usize, ln_term: f64, ln_sum: f64) -> bool {
        let negligible = ln_term <= ln_sum + self.ln_tol && ln_term <= self.prev && t >= self.mode;
        self.prev = ln_term;
        if negligible {
            self.small += 1;
        } else {
            self.small = 0;
        }
        self.small >= 3
    }
}

fn check_gamma(name: &'static str, g: f64) -> Result<()> {
    if g == 0.0 {
        return Err(Error::Boundary(name));
    }
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::invalid(name, format!("must be positive and finite, got {g}")));
    }
    Ok(())
}

/// Per-link factor Σ_k w_k f_W(x) dW/dγ for successive t, with the Bessel
/// ladders extended on demand.
struct LinkFactor {
    alpha: f64,
    ln_w: Vec<f64>,
    ln_x: f64,
    z: f64,
    ln_jac: f64,
    ln_gamma_k: Vec<f64>,
    ladders: Vec<Vec<f64>>,
}

impl LinkFactor {
    fn new(params: &MalagaParams, lambda: f64, mu: f64, g: f64) -> Result<Self> {
        let x = lambda * (g / mu).sqrt();
        let beta = params.beta() as usize;
        let ln_gamma_k = (1..=beta).map(|k| ln_gamma(k as f64)).collect::<Result<Vec<_>>>()?;
        Ok(LinkFactor {
            alpha: params.alpha(),
            ln_w: params.ln_mixture_weights(),
            ln_x: x.ln(),
            z: 2.0 * x.sqrt(),
            ln_jac: lambda.ln() - LN_2 - 0.5 * (g * mu).ln(),
            ln_gamma_k,
            ladders: vec![Vec::new(); beta],
        })
    }

    fn ln_value(&mut self, t: usize, ln_gamma_a: f64) -> Result<f64> {
        let a = self.alpha + t as f64;
        let mut acc = f64::NEG_INFINITY;
        for (i, ladder) in self.ladders.iter_mut().enumerate() {
            if t >= ladder.len() {
                let len = (2 * ladder.len()).max(t + 1).max(64);
                *ladder = ln_bessel_k_seq(self.alpha - (i + 1) as f64, len, self.z)?;
            }
            let k = (i + 1) as f64;
            let l = self.ln_w[i] + LN_2 + (0.5 * (a + k) - 1.0) * self.ln_x + ladder[t] - ln_gamma_a - self.ln_gamma_k[i];
            acc = log_add(acc, l);
        }
        Ok(acc + self.ln_jac)
    }
}

/// Density of the correlated SNR pair at (g1, g2).
pub fn joint_pdf(link: &CorrelatedLink, g1: f64, g2: f64, num: &SeriesNumerics) -> Result<f64> {
    num.validate()?;
    check_gamma("gamma1", g1)?;
    check_gamma("gamma2", g2)?;
    let params = link.params();
    if link.rho() == 0.0 {
        return Ok(marginal_pdf(params, link.mu1(), g1, num)? * marginal_pdf(params, link.mu2(), g2, num)?);
    }
    let lambda = link.lambda();
    let mut f1 = LinkFactor::new(params, lambda, link.mu1(), g1)?;
    let mut f2 = LinkFactor::new(params, lambda, link.mu2(), g2)?;
    let alpha = params.alpha();
    let mut stop = Truncation::new(num.rel_tol, alpha, link.rho());
    let mut ln_sum = f64::NEG_INFINITY;
    for t in 0..=num.t_max {
        let ln_pi = ln_kibble_weight(alpha, link.rho(), t, num.denominator)?;
        let ln_term = if ln_pi == f64::NEG_INFINITY {
            ln_pi
        } else {
            let lga = ln_gamma(alpha + t as f64)?;
            ln_pi + f1.ln_value(t, lga)? + f2.ln_value(t, lga)?
        };
        ln_sum = log_add(ln_sum, ln_term);
        if stop.push(t, ln_term, ln_sum) {
            return Ok(ln_sum.exp());
        }
    }
    Err(Error::Truncated {
        terms: num.t_max,
        partial: ln_sum.exp(),
    })
}

/// Single-link SNR density with mean `mu`.
pub fn marginal_pdf(params: &MalagaParams, mu: f64, g: f64, num: &SeriesNumerics) -> Result<f64> {
    num.validate()?;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid("mu", format!("must be positive and finite, got {mu}")));
    }
    check_gamma("gamma", g)?;
    let mut f = LinkFactor::new(params, params.kappa(), mu, g)?;
    Ok(f.ln_value(0, ln_gamma(params.alpha())?)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Preset;
    use crate::specfun::adaptive::{integrate_panels, integrate_to_infinity, Tolerance};
    use approx::assert_relative_eq;

    fn num() -> SeriesNumerics {
        SeriesNumerics::default()
    }

    #[test]
    fn kibble_weights_sum_to_one() {
        for &(alpha, rho) in &[(2.296, 0.5), (8.0, 0.9), (0.8, 0.3)] {
            let s: f64 = (0..3000)
                .map(|t| ln_kibble_weight(alpha, rho, t, DenominatorConvention::FactorialT).unwrap().exp())
                .sum();
            assert_relative_eq!(s, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_t_weights_give_mean_of_t() {
        let (alpha, rho) = (2.296, 0.5);
        let s: f64 = (0..3000)
            .map(|t| ln_kibble_weight(alpha, rho, t, DenominatorConvention::GammaT).unwrap().exp())
            .sum();
        assert_relative_eq!(s, alpha * rho * rho / (1.0 - rho * rho), max_relative = 1e-12);
    }

    #[test]
    fn boundary_is_an_error() {
        let link = CorrelatedLink::new(Preset::Strong.params(), 1.0, 1.0, 0.5).unwrap();
        assert_eq!(joint_pdf(&link, 0.0, 1.0, &num()), Err(Error::Boundary("gamma1")));
        assert_eq!(joint_pdf(&link, 1.0, 0.0, &num()), Err(Error::Boundary("gamma2")));
    }

    #[test]
    fn marginal_normalized_with_mean_mu() {
        for preset in [Preset::Strong, Preset::Weak] {
            let p = preset.params();
            let mu = 3.0;
            let tol = Tolerance::new(1e-14, 1e-12);
            let f = |g: f64| marginal_pdf(&p, mu, g, &num()).unwrap();
            let head = integrate_panels(|g| if g > 0.0 { f(g) } else { 0.0 }, &[0.0, 1e-6, 1e-3, 0.1, 1.0], tol).unwrap();
            let tail = integrate_to_infinity(f, 1.0, tol).unwrap();
            assert!((head.value + tail.value - 1.0).abs() < 1e-6, "{preset}: {}", head.value + tail.value);
            let m_head = integrate_panels(|g| if g > 0.0 { g * f(g) } else { 0.0 }, &[0.0, 1e-3, 0.1, 1.0], tol).unwrap();
            let m_tail = integrate_to_infinity(|g| g * f(g), 1.0, tol).unwrap();
            assert_relative_eq!(m_head.value + m_tail.value, mu, max_relative = 1e-4);
        }
    }

    #[test]
    fn exchange_symmetry() {
        let link = CorrelatedLink::new(Preset::Strong.params(), 2.0, 7.0, 0.6).unwrap();
        let sw = link.swapped();
        for &(a, b) in &[(0.3, 4.0), (2.0, 2.0), (10.0, 0.01)] {
            let x = joint_pdf(&link, a, b, &num()).unwrap();
            let y = joint_pdf(&sw, b, a, &num()).unwrap();
            assert_relative_eq!(x, y, max_relative = 1e-13);
        }
    }

    #[test]
    fn small_rho_factorizes() {
        let p = Preset::Weak.params();
        let link = CorrelatedLink::new(p, 3.0, 5.0, 1e-6).unwrap();
        for &g1 in &[0.1, 1.0, 6.0] {
            for &g2 in &[0.2, 3.0, 12.0] {
                let j = joint_pdf(&link, g1, g2, &num()).unwrap();
                let m = marginal_pdf(&p, 3.0, g1, &num()).unwrap() * marginal_pdf(&p, 5.0, g2, &num()).unwrap();
                assert_relative_eq!(j, m, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn truncation_stable_under_larger_t_max() {
        let link = CorrelatedLink::new(Preset::Weak.params(), 4.0, 4.0, 0.9).unwrap();
        let a = joint_pdf(&link, 1.0, 9.0, &num()).unwrap();
        let b = joint_pdf(&link, 1.0, 9.0, &SeriesNumerics { rel_tol: 1e-13, ..num() }).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn t_max_exhaustion_reports_partial() {
        let link = CorrelatedLink::new(Preset::Weak.params(), 4.0, 4.0, 0.9).unwrap();
        match joint_pdf(&link, 1.0, 1.0, &SeriesNumerics { t_max: 3, ..num() }) {
            Err(Error::Truncated { terms: 3, partial }) => assert!(partial > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
