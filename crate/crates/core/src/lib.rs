//! Secrecy outage probability and probability of non-zero secrecy capacity
//! for free-space optical links over correlated Málaga turbulence.
pub mod channel;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod secrecy;
pub mod specfun;

pub use error::{Error, Result};
pub use numerics::{DenominatorConvention, KummerConvention, SeriesNumerics};
