use crate::channel::{sample_pair, CorrelatedLink};
use crate::error::{Error, Result};
use crate::secrecy::SecrecyTarget;

pub const MIN_SAMPLES: usize = 10_000;

/// Bernoulli frequency estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    fn from_count(hits: usize, samples: usize, seed: u64) -> Self {
        let value = hits as f64 / samples as f64;
        McEstimate {
            value,
            std_error: (value * (1.0 - value) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    /// Whether `x` lies within `k` standard errors. A zero standard error
    /// (all or no hits) falls back to a one-count allowance.
    pub fn covers(&self, x: f64, k: f64) -> bool {
        let se = self.std_error.max(1.0 / self.samples as f64);
        (x - self.value).abs() <= k * se
    }
}

fn check(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid("samples", format!("need at least {MIN_SAMPLES}, got {samples}")));
    }
    Ok(())
}

/// Fraction of draws with γ1 ≤ Θγ2 + Θ − 1.
pub fn sop_mc(link: &CorrelatedLink, target: &SecrecyTarget, samples: usize, seed: u64) -> Result<McEstimate> {
    check(samples)?;
    let batch = sample_pair(link, samples, seed)?;
    let theta = target.theta();
    let hits = batch
        .gamma1
        .iter()
        .zip(&batch.gamma2)
        .filter(|&(&g1, &g2)| g1 <= theta * g2 + theta - 1.0)
        .count();
    Ok(McEstimate::from_count(hits, samples, seed))
}

/// Fraction of draws with γ1 > γ2 (ties have probability zero), on the same
/// stream as [`sop_mc`] so the two are exact complements at Rs = 0.
pub fn pnzsc_mc(link: &CorrelatedLink, samples: usize, seed: u64) -> Result<McEstimate> {
    check(samples)?;
    let batch = sample_pair(link, samples, seed)?;
    let hits = batch.gamma1.iter().zip(&batch.gamma2).filter(|&(&g1, &g2)| g1 > g2).count();
    Ok(McEstimate::from_count(hits, samples, seed))
}
