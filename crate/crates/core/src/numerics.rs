//! Truncation, tolerance and quadrature policy shared by every series and
//! quadrature evaluation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::meijer::DEFAULT_EPSILON_SHIFT;
use crate::specfun::quadrature::MAX_ORDER;

/// Denominator of the t-th mixture coefficient of the joint density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorConvention {
    /// 1/Γ(t): the t = 0 term vanishes.
    GammaT,
    /// 1/Γ(t+1) = 1/t!
    #[default]
    FactorialT,
}

/// Parameters of the Tricomi U factor in the half-range quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KummerConvention {
    /// U(v + 1/2, 2v + 1; 2s²)
    #[default]
    Derived,
    /// U((v + 1)/2, v + 1; 2s²)
    Printed,
}

impl FromStr for DenominatorConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma_t" | "gamma-t" => Ok(Self::GammaT),
            "factorial_t" | "factorial-t" => Ok(Self::FactorialT),
            _ => Err(Error::invalid("denominator", format!("expected gamma_t or factorial_t, got {s:?}"))),
        }
    }
}

impl fmt::Display for DenominatorConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GammaT => "gamma_t",
            Self::FactorialT => "factorial_t",
        })
    }
}

impl FromStr for KummerConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Self::Derived),
            "printed" => Ok(Self::Printed),
            _ => Err(Error::invalid("kummer", format!("expected derived or printed, got {s:?}"))),
        }
    }
}

impl fmt::Display for KummerConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Derived => "derived",
            Self::Printed => "printed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesNumerics {
    /// Hard cap on the mixture index t.
    pub t_max: usize,
    /// Relative contribution below which a mixture term counts as negligible.
    pub rel_tol: f64,
    /// Order L of the half-range Gauss rule.
    pub quad_order: usize,
    pub epsilon_shift: f64,
    pub denominator: DenominatorConvention,
    pub kummer: KummerConvention,
}

impl Default for SeriesNumerics {
    fn default() -> Self {
        SeriesNumerics {
            t_max: 2000,
            rel_tol: 1e-10,
            quad_order: 30,
            epsilon_shift: DEFAULT_EPSILON_SHIFT,
            denominator: DenominatorConvention::FactorialT,
            kummer: KummerConvention::Derived,
        }
    }
}

impl SeriesNumerics {
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(Error::invalid("t_max", "must be positive"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(Error::invalid("rel_tol", format!("must be in (0, 1e-4], got {}", self.rel_tol)));
        }
        if self.quad_order == 0 || self.quad_order > MAX_ORDER {
            return Err(Error::invalid(
                "quad_order",
                format!("must be in 1..={MAX_ORDER}, got {}", self.quad_order),
            ));
        }
        if !(self.epsilon_shift > 0.0 && self.epsilon_shift <= 1e-5) {
            return Err(Error::invalid(
                "epsilon_shift",
                format!("must be in (0, 1e-5], got {}", self.epsilon_shift),
            ));
        }
        Ok(())
    }
}
