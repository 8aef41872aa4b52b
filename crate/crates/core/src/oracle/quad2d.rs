//! Brute-force double integration of the joint density.

use std::cell::RefCell;

use crate::channel::{joint_pdf, marginal_pdf, CorrelatedLink, MalagaParams};
use crate::error::{Error, Result};
use crate::numerics::SeriesNumerics;
use crate::secrecy::SecrecyTarget;
use crate::specfun::adaptive::{integrate_panels, integrate_to_infinity, Estimate, Tolerance};

pub const MIN_ABS_TOL: f64 = 1e-8;
const INNER_REL: f64 = 1e-7;
const OUTER_REL: f64 = 1e-6;

/// Initial panels on [0, v]: log-spaced towards the origin, where the
/// integrand concentrates at low SNR.
fn panels(v: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend((0..=5).rev().map(|k| v * 10f64.powi(-k)));
    b
}

/// Smallest g (doubling from mu) with P(γ > g) below `bound`, taken from
/// the tail integral of the marginal density.
fn tail_cut(params: &MalagaParams, mu: f64, bound: f64, num: &SeriesNumerics) -> Result<f64> {
    let mut g = 4.0 * mu;
    for _ in 0..200 {
        let tail = integrate_to_infinity(
            |x| marginal_pdf(params, mu, x, num).unwrap_or(0.0),
            g,
            Tolerance::new(bound * 1e-3, 1e-6),
        )?;
        if tail.value + tail.error < bound {
            return Ok(g);
        }
        g *= 2.0;
    }
    Err(Error::no_convergence("tail bound", format!("tail still above {bound:e} at {g:e}")))
}

/// ∫_0^{g2_max} ∫_0^{min(upper(γ2), g1_max)} f(γ1, γ2) dγ1 dγ2 with both
/// variables mapped to their square roots.
fn region<U: Fn(f64) -> f64>(
    link: &CorrelatedLink,
    num: &SeriesNumerics,
    upper: U,
    abs_tol: f64,
) -> Result<Estimate> {
    let params = link.params();
    let g1_max = tail_cut(params, link.mu1(), abs_tol / 10.0, num)?;
    let g2_max = tail_cut(params, link.mu2(), abs_tol / 10.0, num)?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let record = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
        0.0
    };
    let density = |g1: f64, g2: f64| {
        if g1 == 0.0 || g2 == 0.0 {
            return 0.0;
        }
        joint_pdf(link, g1, g2, num).unwrap_or_else(record)
    };
    let inner = |g2: f64| {
        let top = upper(g2).min(g1_max);
        if !(top > 0.0) {
            return 0.0;
        }
        let tol = Tolerance::new(0.0, INNER_REL);
        match integrate_panels(|v| 2.0 * v * density(v * v, g2), &panels(top.sqrt()), tol) {
            Ok(e) => e.value,
            Err(e) => record(e),
        }
    };
    let outer = integrate_panels(
        |v| 2.0 * v * inner(v * v),
        &panels(g2_max.sqrt()),
        Tolerance::new(abs_tol * 1e-2, OUTER_REL),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer
}

fn check_tol(abs_tol: f64) -> Result<()> {
    if !(abs_tol >= MIN_ABS_TOL) || !abs_tol.is_finite() {
        return Err(Error::invalid("abs_tol", format!("must be at least {MIN_ABS_TOL:e}, got {abs_tol}")));
    }
    Ok(())
}

/// SOP as the integral of the joint density over γ1 ≤ Θ(1 + γ2) − 1.
pub fn sop_quad2d(link: &CorrelatedLink, target: &SecrecyTarget, abs_tol: f64) -> Result<f64> {
    check_tol(abs_tol)?;
    let theta = target.theta();
    let est = region(link, &SeriesNumerics::default(), |g2| theta * (1.0 + g2) - 1.0, abs_tol)?;
    Ok(est.value)
}

/// ∫∫ joint_pdf over the quadrant (cut where both marginal tails are below
/// 1e-9) minus 1.
pub fn normalization_check(link: &CorrelatedLink, num: &SeriesNumerics) -> Result<f64> {
    num.validate()?;
    let est = region(link, num, |_| f64::INFINITY, 1e-8)?;
    Ok(est.value - 1.0)
}
