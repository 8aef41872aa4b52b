//! Independent ground truth for the closed forms: Monte Carlo frequencies,
//! brute-force double integration of the joint density, and Mellin-Barnes
//! contour integrals for the special functions.

pub mod contour;
mod mc;
mod quad2d;

pub use contour::{hyp_pfq_contour, ln_gamma_complex, meijer_g_contour};
pub use mc::{pnzsc_mc, sop_mc, McEstimate, MIN_SAMPLES};
pub use quad2d::{normalization_check, sop_quad2d, MIN_ABS_TOL};
