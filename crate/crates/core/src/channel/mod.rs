//! Málaga turbulence parameters, the correlated SNR pair and its densities,
//! and a seeded generative sampler.
//!
//! Model: the irradiance on link p is I_p = X_p·Y_p. The large-scale pair
//! (X_D, X_E) is a Kibble bivariate Gamma with shape α and parameter ρ; given
//! the negative-binomial mixture index t, both are Gamma(α + t) with scale
//! proportional to 1 − ρ². The small-scale factors are independent Málaga
//! variables, i.e. a binomial mixture of Gamma(k), k = 1..β. The SNR is
//! γ_p = μ_p I_p² / E{I²}.

pub(crate) mod density;
mod sampler;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::gamma::ln_binomial;

pub use density::{joint_pdf, marginal_pdf};
pub use sampler::{parse_batch_csv, parse_batch_meta, sample_large_scale, sample_pair, SampleBatch};

/// Shared parameters of the conventional presets.
pub const PRESET_B0: f64 = 0.423;
pub const PRESET_DELTA: f64 = 0.84;
pub const PRESET_OMEGA1: f64 = 2.04;

/// How the average LOS power Ω1 is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosSpec {
    /// Ω1 = Ω′ + 2b0δ + 2√(2b0δΩ′) cos(φA − φB).
    Components { omega_prime: f64, phi_a: f64, phi_b: f64 },
    Omega1(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalagaParams {
    alpha: f64,
    beta: u32,
    b0: f64,
    delta: f64,
    omega: f64,
    los: LosSpec,
    omega1: f64,
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl MalagaParams {
    pub fn new(alpha: f64, beta: u32, b0: f64, delta: f64, omega: f64, los: LosSpec) -> Result<Self> {
        positive("alpha", alpha)?;
        if beta == 0 {
            return Err(Error::invalid("beta", "must be a positive integer"));
        }
        positive("b0", b0)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta", format!("must be in (0, 1), got {delta}")));
        }
        positive("omega", omega)?;
        let omega1 = match los {
            LosSpec::Omega1(o) => {
                positive("omega1", o)?;
                o
            }
            LosSpec::Components {
                omega_prime,
                phi_a,
                phi_b,
            } => {
                if !(omega_prime >= 0.0) || !omega_prime.is_finite() {
                    return Err(Error::invalid("omega_prime", format!("must be non-negative, got {omega_prime}")));
                }
                if !phi_a.is_finite() || !phi_b.is_finite() {
                    return Err(Error::invalid("phi", "phases must be finite"));
                }
                let c = 2.0 * b0 * delta;
                let o = omega_prime + c + 2.0 * (c * omega_prime).sqrt() * (phi_a - phi_b).cos();
                if !(o > 0.0) {
                    return Err(Error::invalid("omega1", format!("LOS components give non-positive power {o}")));
                }
                o
            }
        };
        Ok(MalagaParams {
            alpha,
            beta,
            b0,
            delta,
            omega,
            los,
            omega1,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> u32 {
        self.beta
    }
    pub fn b0(&self) -> f64 {
        self.b0
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn los(&self) -> LosSpec {
        self.los
    }

    /// Average power of the scattering component, 2b0(1 − δ).
    pub fn xi(&self) -> f64 {
        2.0 * self.b0 * (1.0 - self.delta)
    }

    /// Average power of the LOS component.
    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    /// Binomial success probability q = Ω1/(ξβ + Ω1) of the small-scale mixture.
    pub(crate) fn mixture_q(&self) -> f64 {
        self.omega1 / (self.xi() * self.beta as f64 + self.omega1)
    }

    /// ln w_k for k = 1..β, w_k = C(β−1, k−1) q^{k−1} (1−q)^{β−k}.
    pub fn ln_mixture_weights(&self) -> Vec<f64> {
        let q = self.mixture_q();
        let n = self.beta as f64 - 1.0;
        (1..=self.beta)
            .map(|k| {
                let j = k as f64 - 1.0;
                let w = q.powi(k as i32 - 1) * (1.0 - q).powi((self.beta - k) as i32);
                ln_binomial(n, j).unwrap_or(f64::NEG_INFINITY) + w.ln()
            })
            .collect()
    }

    /// E{K(K+1)} for the small-scale mixture index K.
    fn mixture_second_factorial(&self) -> f64 {
        let n = self.beta as f64 - 1.0;
        let q = self.mixture_q();
        2.0 + 3.0 * n * q + n * q * (1.0 - q) + n * n * q * q
    }

    /// κ = √(α(α+1)E{K(K+1)}), the root second moment of X'Y' with
    /// X' ~ Gamma(α, 1) and Y' the small-scale mixture in unit scale.
    pub fn kappa(&self) -> f64 {
        (self.alpha * (self.alpha + 1.0) * self.mixture_second_factorial()).sqrt()
    }
}

/// Ω giving E{I} = 1.
pub fn unit_mean_omega(b0: f64, delta: f64, omega1: f64) -> f64 {
    1.0 / (2.0 * b0 * (1.0 - delta) + omega1)
}

/// Conventional turbulence presets. Only α and β differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Strong,
    Moderate,
    Weak,
}

impl Preset {
    pub fn alpha_beta(self) -> (f64, u32) {
        match self {
            Preset::Strong => (2.296, 2),
            Preset::Moderate => (4.2, 3),
            Preset::Weak => (8.0, 4),
        }
    }

    pub fn params(self) -> MalagaParams {
        let (alpha, beta) = self.alpha_beta();
        MalagaParams::new(
            alpha,
            beta,
            PRESET_B0,
            PRESET_DELTA,
            unit_mean_omega(PRESET_B0, PRESET_DELTA, PRESET_OMEGA1),
            LosSpec::Omega1(PRESET_OMEGA1),
        )
        .expect("preset parameters are valid")
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strong" => Ok(Preset::Strong),
            "moderate" => Ok(Preset::Moderate),
            "weak" => Ok(Preset::Weak),
            _ => Err(Error::invalid("preset", format!("expected strong, moderate or weak, got {s:?}"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Strong => "strong",
            Preset::Moderate => "moderate",
            Preset::Weak => "weak",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConstants {
    pub xi: f64,
    pub omega1: f64,
    /// β/(Ω(ξβ + Ω1)); divide by 1 − ρ² for the per-link factor.
    pub c_factor: f64,
    pub kappa: f64,
    /// ξ negligible against Ω1: the scatter component has collapsed onto the LOS.
    pub degenerate: bool,
}

pub fn derive_constants(params: &MalagaParams) -> ChannelConstants {
    let xi = params.xi();
    let omega1 = params.omega1();
    let beta = params.beta() as f64;
    ChannelConstants {
        xi,
        omega1,
        c_factor: beta / (params.omega() * (xi * beta + omega1)),
        kappa: params.kappa(),
        degenerate: xi <= 1e-9 * omega1,
    }
}

/// Main and wiretap links sharing one set of turbulence parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedLink {
    params: MalagaParams,
    mu1: f64,
    mu2: f64,
    rho: f64,
}

impl CorrelatedLink {
    pub fn new(params: MalagaParams, mu1: f64, mu2: f64, rho: f64) -> Result<Self> {
        positive("mu1", mu1)?;
        positive("mu2", mu2)?;
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::invalid("rho", format!("must be in [0, 1), got {rho}")));
        }
        Ok(CorrelatedLink { params, mu1, mu2, rho })
    }

    pub fn params(&self) -> &MalagaParams {
        &self.params
    }
    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    pub fn mu2(&self) -> f64 {
        self.mu2
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.params, self.mu1, self.mu2, rho)
    }

    pub fn with_mu(&self, mu1: f64, mu2: f64) -> Result<Self> {
        Self::new(self.params, mu1, mu2, self.rho)
    }

    /// λ with √(γ_p/μ_p) = W_p/λ, W_p = X'_p Y'_p in unit scales.
    pub fn lambda(&self) -> f64 {
        self.params.kappa() / (1.0 - self.rho * self.rho)
    }

    /// Swap the roles of the two links.
    pub fn swapped(&self) -> Self {
        CorrelatedLink {
            mu1: self.mu2,
            mu2: self.mu1,
            ..*self
        }
    }
}

/// Mode of the negative-binomial mixture index.
pub(crate) fn mixture_mode(alpha: f64, rho: f64) -> usize {
    let r2 = rho * rho;
    if alpha <= 1.0 || r2 == 0.0 {
        0
    } else {
        ((alpha - 1.0) * r2 / (1.0 - r2)).floor() as usize
    }
}
