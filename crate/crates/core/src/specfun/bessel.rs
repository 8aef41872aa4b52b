//! Modified Bessel function of the second kind for real order.
//!
//! K_μ and K_{μ+1} with |μ| <= 1/2 come from Temme's series for x < 2 and
//! from Steed's continued fraction (CF2) otherwise; higher orders follow by
//! forward recurrence, which is stable for K. The recurrence is carried on
//! the ratio K_{ν+1}/K_ν so arbitrarily large orders stay finite in log form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-17;
const MAX_ITER: usize = 100_000;

/// Taylor coefficients of 1/Γ(1+z) about z = 0.
const RECIP_GAMMA_TAYLOR: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_24,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_33,
    -0.009_621_971_527_876_973,
    0.007_218_943_246_663_1,
    -0.001_165_167_591_859_065,
    -0.000_215_241_674_114_950_97,
    0.000_128_050_282_388_116_2,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_670_7e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_02e-9,
    1.043_426_711_691_100_5e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_507e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_260_8e-15,
    -1.181_259_301_697_458_8e-16,
    1.186_692_254_751_600_3e-18,
];

/// (gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ)) as used by Temme's series.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    // Horner on even / odd parts separately.
    let mu2 = mu * mu;
    let mut p = 1.0;
    for (k, c) in RECIP_GAMMA_TAYLOR.iter().enumerate() {
        if k % 2 == 0 {
            gam2 += c * p;
        } else {
            gam1 -= c * p;
            p *= mu2;
        }
    }
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

/// (ln K_μ(x), ln K_{μ+1}(x)) for |μ| <= 1/2, x > 0.
fn ln_k_pair(mu: f64, x: f64) -> Result<(f64, f64)> {
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < 1e-15 {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu * mu);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::no_convergence("bessel_k Temme series", format!("mu={mu}, x={x}")));
        }
        Ok((sum.ln(), (sum1 * 2.0 / x).ln()))
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * fi;
            c = -a * c / (fi + 1.0);
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::no_convergence("bessel_k CF2", format!("mu={mu}, x={x}")));
        }
        h *= a1;
        let ln_kmu = 0.5 * (PI / (2.0 * x)).ln() - x - s.ln();
        let ratio = (mu + x + 0.5 - h) / x;
        Ok((ln_kmu, ln_kmu + ratio.ln()))
    }
}

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::invalid("nu", "must be finite"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("must be positive and finite, got {x}")));
    }
    Ok(())
}

/// ln K_{base + n}(x) for n = 0..=n_max, with |base| <= 1/2.
pub fn ln_bessel_k_ladder(base: f64, n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_args(base, x)?;
    if base.abs() > 0.5 + 1e-15 {
        return Err(Error::invalid("base", "ladder base must lie in [-1/2, 1/2]"));
    }
    let (l0, l1) = ln_k_pair(base, x)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(l0);
    if n_max == 0 {
        return Ok(out);
    }
    out.push(l1);
    // r = K_{μ+j+1} / K_{μ+j}
    let mut r = (l1 - l0).exp();
    let mut last = l1;
    for j in 1..n_max {
        r = 2.0 * (base + j as f64) / x + 1.0 / r;
        last += r.ln();
        out.push(last);
    }
    Ok(out)
}

/// ln K_ν(x) for any real ν and x > 0. K is even in ν.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    let nu = nu.abs();
    let n = (nu + 0.5).floor();
    let base = nu - n;
    let ladder = ln_bessel_k_ladder(base, n as usize, x)?;
    Ok(ladder[n as usize])
}

/// ln K_{|ν0 + j|}(x) for j = 0..count, sharing ladders across the sequence.
pub fn ln_bessel_k_seq(nu0: f64, count: usize, x: f64) -> Result<Vec<f64>> {
    check_args(nu0, x)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let last = nu0 + (count - 1) as f64;
    let mut out = vec![0.0; count];
    // orders >= 0 on one ladder
    let first_pos = if nu0 >= 0.0 { 0 } else { (-nu0).ceil() as usize };
    if first_pos < count {
        let start = nu0 + first_pos as f64;
        let n0 = (start + 0.5).floor();
        let base = start - n0;
        let top = (last + 0.5).floor() as usize;
        let ladder = ln_bessel_k_ladder(base, top, x)?;
        for (j, slot) in out.iter_mut().enumerate().skip(first_pos) {
            *slot = ladder[n0 as usize + j - first_pos];
        }
    }
    // negative orders |ν0 + j| = -ν0 - j, largest at j = 0
    if first_pos > 0 {
        let top_order = -nu0;
        let low = -(nu0 + (first_pos - 1) as f64);
        let n_low = (low + 0.5).floor();
        let base = low - n_low;
        let n_top = (top_order - base).round() as usize;
        let ladder = ln_bessel_k_ladder(base, n_top, x)?;
        for (j, slot) in out.iter_mut().enumerate().take(first_pos.min(count)) {
            let order = -(nu0 + j as f64);
            *slot = ladder[(order - base).round() as usize];
        }
    }
    Ok(out)
}

/// e^x K_ν(x).
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    let l = ln_bessel_k(nu, x)? + x;
    if l > 709.0 {
        return Err(Error::Overflow("bessel_k_scaled"));
    }
    Ok(l.exp())
}

/// K_ν(x). Errors with [`Error::Overflow`] when the value exceeds f64 range
/// (tiny x with large ν); underflow for very large x saturates to zero.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let l = ln_bessel_k(nu, x)?;
    if l > 709.0 {
        return Err(Error::Overflow("bessel_k"));
    }
    Ok(l.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(νt) dt, composite Simpson on a
    // truncated range. Kept deliberately naive.
    fn integral_oracle(nu: f64, x: f64) -> f64 {
        let upper = ((60.0 + nu * 10.0) / x).max(1.0).acosh() + 2.0;
        let n = 200_000;
        let h = upper / n as f64;
        let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh();
        let mut s = f(0.0) + f(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn half_integer_closed_form() {
        let want = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert_relative_eq!(bessel_k(0.5, 1.0).unwrap(), want, max_relative = 1e-14);
        // K_{5/2}(x) = sqrt(π/2x) e^{-x} (1 + 3/x + 3/x²)
        let x = 3.7;
        let want = (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 3.0 / x + 3.0 / (x * x));
        assert_relative_eq!(bessel_k(2.5, x).unwrap(), want, max_relative = 1e-13);
    }

    #[test]
    fn order_zero_at_one_matches_integral() {
        let oracle = integral_oracle(0.0, 1.0);
        assert_relative_eq!(oracle, 0.421_024_438_240_708_3, max_relative = 1e-10);
        assert_relative_eq!(bessel_k(0.0, 1.0).unwrap(), oracle, max_relative = 1e-10);
    }

    #[test]
    fn grid_matches_integral_oracle() {
        for &nu in &[0.0, 0.3, 1.0, 2.296, 7.5, 20.1] {
            for &x in &[0.05, 0.7, 1.99, 2.01, 9.0, 40.0] {
                let want = integral_oracle(nu, x);
                let got = bessel_k(nu, x).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn large_argument_asymptote() {
        for &nu in &[0.0f64, 1.0, 3.0] {
            let x = 60.0 * nu.max(1.0);
            let asym = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let got = bessel_k(nu, x).unwrap();
            assert!((got / asym - 1.0).abs() < 0.01 + nu * nu / x);
        }
        // far tail in log form
        let l = ln_bessel_k(1.0, 699.0).unwrap();
        assert_relative_eq!(l, 0.5 * (PI / 1398.0).ln() - 699.0 + (1.0 + 3.0 / 5592.0 - 15.0 / (2.0 * 5592.0f64 * 5592.0)).ln(), max_relative = 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(bessel_k(200.0, 1e-3), Err(Error::Overflow("bessel_k")));
        assert!(ln_bessel_k(200.0, 1e-3).unwrap().is_finite());
    }

    #[test]
    fn symmetric_in_order() {
        assert_eq!(ln_bessel_k(-1.3, 2.2).unwrap(), ln_bessel_k(1.3, 2.2).unwrap());
    }

    #[test]
    fn ladder_matches_direct() {
        let ladder = ln_bessel_k_ladder(0.296, 40, 3.3).unwrap();
        for (n, l) in ladder.iter().enumerate() {
            let direct = ln_bessel_k(0.296 + n as f64, 3.3).unwrap();
            assert_relative_eq!(*l, direct, max_relative = 1e-14);
        }
    }

    #[test]
    fn sequence_crossing_zero_matches_direct() {
        for &(nu0, x) in &[(-3.3, 0.7), (2.296, 5.0), (-0.5, 1.0), (-4.0, 3.0)] {
            let seq = ln_bessel_k_seq(nu0, 12, x).unwrap();
            for (j, l) in seq.iter().enumerate() {
                let direct = ln_bessel_k(nu0 + j as f64, x).unwrap();
                assert_relative_eq!(*l, direct, max_relative = 1e-13, epsilon = 1e-14);
            }
        }
    }
}
