//! E{h(W)} for W = X'Y', X' ~ Gamma(a), Y' ~ Gamma(k): the half-range
//! Gauss rule in s with W = s⁴/4, or a tensor Gauss rule in (X', Y') when
//! the half-range rule cannot resolve the density.

use std::f64::consts::{LN_2, PI};

use crate::error::Result;
use crate::numerics::{KummerConvention, SeriesNumerics};
use crate::specfun::gamma::ln_gamma;
use crate::specfun::kummer::ln_kummer_u;
use crate::specfun::quadrature::{gamma_gauss_rule, halfrange_gauss_rule};

/// Largest a + k handled by the half-range rule.
pub const HALF_RANGE_MAX_SHAPE: f64 = 40.0;

/// Nodes of the tensor rule along X' (the Y' direction uses quad_order).
const PRODUCT_X_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    HalfRange,
    Product,
}

pub fn route_for(a: f64, k: usize) -> Route {
    if a + k as f64 <= HALF_RANGE_MAX_SHAPE {
        Route::HalfRange
    } else {
        Route::Product
    }
}

/// (W, weight) pairs with Σ weight·h(W) ≈ E{h(W)}.
pub fn w_nodes(a: f64, k: usize, route: Route, order: usize, num: &SeriesNumerics) -> Result<Vec<(f64, f64)>> {
    match route {
        Route::HalfRange => half_range_nodes(a, k, order, num.kummer),
        Route::Product => {
            let rx = gamma_gauss_rule(a, PRODUCT_X_ORDER.min(order.max(2)))?;
            let ry = gamma_gauss_rule(k as f64, order)?;
            let mut out = Vec::with_capacity(rx.order() * ry.order());
            for (x, wx) in rx.iter() {
                for (y, wy) in ry.iter() {
                    out.push((x * y, wx * wy));
                }
            }
            Ok(out)
        }
    }
}

/// s-weights g(s_ι) of the half-range rule folded into the W nodes.
fn half_range_nodes(a: f64, k: usize, order: usize, kummer: KummerConvention) -> Result<Vec<(f64, f64)>> {
    let rule = halfrange_gauss_rule(order)?;
    let kf = k as f64;
    let v = (a - kf).abs();
    let ln_c = 0.5 * PI.ln() + (v + 3.0 - a - kf) * LN_2 - ln_gamma(a)? - ln_gamma(kf)?;
    let power = 2.0 * (a + kf) + 2.0 * v - 1.0;
    rule.iter()
        .map(|(s, w)| {
            let z = 2.0 * s * s;
            let ln_u = match kummer {
                KummerConvention::Derived => ln_kummer_u(v + 0.5, 2.0 * v + 1.0, z)?,
                KummerConvention::Printed => ln_kummer_u(0.5 * (v + 1.0), v + 1.0, z)?,
            };
            let g = (ln_c + power * s.ln() + ln_u).exp();
            Ok((0.25 * s.powi(4), w * g))
        })
        .collect()
}
