//! Tricomi's confluent hypergeometric function U(a, b, z) for z > 0.
//!
//! The family U(v + 1/2, 2v + 1, z) is evaluated exactly through
//! K_v(z/2) = √π z^v e^{-z/2} U(v + 1/2, 2v + 1, z). Other parameters use the
//! Laplace-type integral (a > 0), the terminating polynomial (a = -n), or
//! Kummer's transformation U(a,b,z) = z^{1-b} U(a-b+1, 2-b, z).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::adaptive::{integrate, integrate_to_infinity, Tolerance};
use crate::specfun::bessel::ln_bessel_k;
use crate::specfun::gamma::{ln_gamma, CompensatedSum};

fn bessel_family_order(a: f64, b: f64) -> Option<f64> {
    let v = a - 0.5;
    if (b - (2.0 * v + 1.0)).abs() <= 1e-14 * b.abs().max(1.0) {
        Some(v)
    } else {
        None
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::invalid("z", format!("must be positive and finite, got {z}")));
    }
    Ok(())
}

/// ln U(v + 1/2, 2v + 1, z) via the Bessel-K identity.
fn ln_u_bessel(v: f64, z: f64) -> Result<f64> {
    Ok(ln_bessel_k(v, 0.5 * z)? + 0.5 * z - 0.5 * PI.ln() - v * z.ln())
}

/// U(a, b, z) for a > 0 from U = z^{-a}/Γ(a) ∫_0^∞ e^{-s} s^{a-1} (1 + s/z)^{b-a-1} ds,
/// returned in log form.
fn ln_u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    let c = b - a - 1.0;
    let tol = Tolerance::new(0.0, 1e-13);
    // [0, 1] with s = u^{1/a}, which absorbs the s^{a-1} endpoint behaviour
    let inv_a = 1.0 / a;
    let head = integrate(
        |u: f64| {
            let s = u.powf(inv_a);
            inv_a * (-s).exp() * (1.0 + s / z).powf(c)
        },
        0.0,
        1.0,
        tol,
    )?;
    let tail = integrate_to_infinity(
        |s: f64| (-s + (a - 1.0) * s.ln() + c * (s / z).ln_1p()).exp(),
        1.0,
        tol,
    )?;
    let total = head.value + tail.value;
    if !(total > 0.0) {
        return Err(Error::no_convergence("kummer_u integral", format!("a={a}, b={b}, z={z}")));
    }
    Ok(total.ln() - a * z.ln() - ln_gamma(a)?)
}

/// U(-n, b, z) = (-1)^n Σ_k C(n,k) (b+k)_{n-k} (-z)^k.
fn u_polynomial(n: usize, b: f64, z: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    let mut binom = 1.0;
    for k in 0..=n {
        let mut poch = 1.0;
        for j in 0..(n - k) {
            poch *= b + k as f64 + j as f64;
        }
        sum.add(binom * poch * (-z).powi(k as i32));
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    if n.is_multiple_of(2) {
        sum.value()
    } else {
        -sum.value()
    }
}

/// Generic path, bypassing the Bessel shortcut. Exposed so the shortcut
/// can be checked against an independent evaluation.
pub fn kummer_u_generic(a: f64, b: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if a == 0.0 {
        return Ok(1.0);
    }
    if a < 0.0 && a == a.floor() {
        return Ok(u_polynomial((-a) as usize, b, z));
    }
    if a > 0.0 {
        return Ok(ln_u_integral(a, b, z)?.exp());
    }
    let a2 = a - b + 1.0;
    if a2 > 0.0 || (a2 <= 0.0 && a2 == a2.floor()) {
        return Ok(z.powf(1.0 - b) * kummer_u_generic(a2, 2.0 - b, z)?);
    }
    Err(Error::no_convergence(
        "kummer_u",
        format!("no representation implemented for a={a}, b={b}"),
    ))
}

/// ln U(a, b, z) where U is positive (a >= 0, or the Bessel family).
pub fn ln_kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if let Some(v) = bessel_family_order(a, b) {
        return ln_u_bessel(v, z);
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    if a > 0.0 {
        return ln_u_integral(a, b, z);
    }
    let a2 = a - b + 1.0;
    if a2 > 0.0 {
        return Ok((1.0 - b) * z.ln() + ln_u_integral(a2, 2.0 - b, z)?);
    }
    let v = kummer_u_generic(a, b, z)?;
    if v > 0.0 {
        Ok(v.ln())
    } else {
        Err(Error::invalid("a", "U is not positive here; use kummer_u"))
    }
}

/// Tricomi U(a, b, z), z > 0.
pub fn kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if let Some(v) = bessel_family_order(a, b) {
        let l = ln_u_bessel(v, z)?;
        if l > 709.0 {
            return Err(Error::Overflow("kummer_u"));
        }
        return Ok(l.exp());
    }
    kummer_u_generic(a, b, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel::bessel_k;
    use approx::assert_relative_eq;

    #[test]
    fn a_zero_is_one() {
        assert_eq!(kummer_u(0.0, 2.7, 1.3).unwrap(), 1.0);
    }

    #[test]
    fn polynomial_case() {
        // U(-1, b, z) = z - b
        assert_relative_eq!(kummer_u(-1.0, 0.4, 3.0).unwrap(), 2.6, max_relative = 1e-14);
        // U(-2, b, z) = z² - 2(b+1)z + b(b+1)
        let (b, z) = (1.5, 2.0);
        assert_relative_eq!(
            kummer_u(-2.0, b, z).unwrap(),
            z * z - 2.0 * (b + 1.0) * z + b * (b + 1.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn generic_path_matches_bessel_identity() {
        for &v in &[0.0, 0.5, 1.0, 2.7, 5.0, 11.3, 40.0] {
            for &z in &[0.3, 1.0, 4.0, 20.0] {
                let via_k = bessel_k(v, z).unwrap() * z.exp() / (PI.sqrt() * (2.0 * z).powf(v));
                let generic = kummer_u_generic(v + 0.5, 2.0 * v + 1.0, 2.0 * z).unwrap();
                assert_relative_eq!(generic, via_k, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn large_argument_leading_term() {
        let (a, b) = (1.3, 0.2);
        let z = 1e6;
        let u = kummer_u(a, b, z).unwrap();
        assert!((u * z.powf(a) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn kummer_transformation_consistent() {
        let (a, b, z) = (0.7, 3.4, 2.2);
        let lhs = kummer_u(a, b, z).unwrap();
        let rhs = z.powf(1.0 - b) * kummer_u(a - b + 1.0, 2.0 - b, z).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    }

    #[test]
    fn negative_order_family() {
        // v < 0 uses the same identity with K even in v
        let v = -1.25;
        let z = 3.0;
        let got = kummer_u(v + 0.5, 2.0 * v + 1.0, z).unwrap();
        let generic = kummer_u_generic(v + 0.5, 2.0 * v + 1.0, z).unwrap();
        assert_relative_eq!(got, generic, max_relative = 1e-9);
    }
}
