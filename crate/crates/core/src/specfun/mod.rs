//! Special-function kernels: Gamma, Bessel K, Tricomi U, pFq, Meijer G and
//! quadrature rules.

pub mod adaptive;
pub mod bessel;
pub mod gamma;
pub mod hypergeometric;
pub mod kummer;
pub mod meijer;
pub mod quadrature;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k};
pub use gamma::{gamma, ln_gamma, ln_gamma_sign, CompensatedSum};
pub use hypergeometric::{hyp_pfq, hyp_pfq_series, SeriesValue};
pub use kummer::{kummer_u, ln_kummer_u};
pub use meijer::{meijer_g, meijer_g_eval, MeijerParams, MeijerValue, Method};
pub use quadrature::{gamma_gauss_rule, halfrange_gauss_rule, QuadratureRule};
