//! Mellin-Barnes contour integration. Independent of the residue series in
//! `specfun::meijer`; used to check it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::adaptive::{integrate, integrate_to_infinity, Estimate, Tolerance};
use crate::specfun::meijer::MeijerParams;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln sin(w), valid for large |Im w|. The imaginary part is only defined
/// modulo 2π.
fn ln_sin(w: Complex64) -> Complex64 {
    if w.im < 0.0 {
        return ln_sin(w.conj()).conj();
    }
    // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
    let i = Complex64::i();
    let e = (2.0 * i * w).exp();
    -i * w + (e - 1.0).ln() - (2.0 * i).ln()
}

/// ln Γ(z) for complex z off the non-positive integers (Lanczos, g = 7).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin(PI * z) - ln_gamma_complex(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (j, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + j as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

fn tolerance() -> Tolerance {
    Tolerance {
        abs: 0.0,
        rel: 1e-11,
        max_pieces: 20_000,
    }
}

/// Sum of the two estimates with propagated error.
fn join(a: Estimate, b: Estimate) -> Estimate {
    Estimate {
        value: a.value + b.value,
        error: a.error + b.error,
    }
}

/// ln of the Mellin-Barnes integrand Π Γ(b_j − s) Π Γ(1 − a_j + s) /
/// (Π Γ(1 − b_j + s) Π Γ(a_j − s)), without the x^s factor.
fn ln_kernel(params: &MeijerParams, s: Complex64) -> Complex64 {
    let (m, n) = (params.m(), params.n());
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &b) in params.b().iter().enumerate() {
        if j < m {
            acc += ln_gamma_complex(b - s);
        } else {
            acc -= ln_gamma_complex(1.0 - b + s);
        }
    }
    for (j, &a) in params.a().iter().enumerate() {
        if j < n {
            acc += ln_gamma_complex(1.0 - a + s);
        } else {
            acc -= ln_gamma_complex(a - s);
        }
    }
    acc
}

/// G^{m,n}_{p,q}(x) by integrating along the vertical line Re s = c, where c
/// separates the poles of Γ(b_j − s), j < m, from those of Γ(1 − a_j + s),
/// j < n. Requires m + n > (p + q)/2 for convergence.
pub fn meijer_g_contour(params: &MeijerParams, x: f64) -> Result<Estimate> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("must be positive and finite, got {x}")));
    }
    let (m, n) = (params.m(), params.n());
    if 2 * (m + n) <= params.p() + params.q() {
        return Err(Error::invalid("params", "vertical contour diverges for this shape"));
    }
    let right = params.b()[..m].iter().copied().fold(f64::INFINITY, f64::min);
    let left = params.a()[..n].iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);
    if left >= right {
        return Err(Error::invalid("params", "no vertical line separates the pole sets"));
    }
    let c = if left.is_finite() { 0.5 * (left + right) } else { right - 0.5 };
    let lx = x.ln();
    // conjugate symmetry: G = (1/π) ∫_0^∞ Re[K(c+iy) x^{c+iy}] dy
    let f = |y: f64| {
        let s = Complex64::new(c, y);
        (ln_kernel(params, s) + s * lx).exp().re / PI
    };
    let head = integrate(f, 0.0, 8.0, tolerance())?;
    let tail = integrate_to_infinity(f, 8.0, tolerance())?;
    Ok(join(head, tail))
}

/// pFq(a; b; z) by integrating Γ(a + s)Γ(−s)/Γ(b + s)·(−z)^s around a
/// hairpin enclosing the non-negative real axis. Any real z when p ≤ q.
pub fn hyp_pfq_contour(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    if a.len() > b.len() {
        return Err(Error::invalid("a", "hairpin contour needs p <= q"));
    }
    if a.iter().any(|&v| !(v > 0.0)) || b.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("a/b", "parameters must be positive"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let c = -0.5 * a.iter().copied().fold(1.0, f64::min);
    let h = 0.5;
    let ln_mz = Complex64::new(-z, 0.0).ln();
    let norm: f64 = b.iter().map(|&v| crate::specfun::ln_gamma(v)).sum::<Result<f64>>()?
        - a.iter().map(|&v| crate::specfun::ln_gamma(v)).sum::<Result<f64>>()?;
    let phi = |s: Complex64| {
        let mut l = ln_gamma_complex(-s) + s * ln_mz + norm;
        for &v in a {
            l += ln_gamma_complex(v + s);
        }
        for &v in b {
            l -= ln_gamma_complex(v + s);
        }
        l.exp()
    };
    // clockwise: top ray outwards, bottom ray inwards, then up the segment;
    // the factor 1/(2πi) is applied piecewise
    let top_bottom = |u: f64| phi(Complex64::new(c + u, h)) - phi(Complex64::new(c + u, -h));
    let rays_re = integrate_to_infinity(|u| (top_bottom(u) / Complex64::new(0.0, 2.0 * PI)).re, 0.0, tolerance())?;
    let segment = integrate(|y| (phi(Complex64::new(c, y)) / (2.0 * PI)).re, -h, h, tolerance())?;
    Ok(rays_re.value + segment.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{hyp_pfq, ln_gamma};
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_real_axis() {
        for &x in &[0.1, 0.5, 1.0, 2.5, 10.3, 40.0, 170.5] {
            let g = ln_gamma_complex(Complex64::new(x, 0.0));
            assert_relative_eq!(g.re, ln_gamma(x).unwrap(), max_relative = 1e-13, epsilon = 1e-14);
        }
    }

    #[test]
    fn gamma_modulus_on_critical_line() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        for &y in &[0.3, 2.0, 15.0, 90.0] {
            let l = ln_gamma_complex(Complex64::new(0.5, y)).re;
            let expected = 0.5 * (PI.ln() - (PI * y).cosh().ln());
            assert_relative_eq!(l, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn recurrence_holds_off_axis() {
        let z = Complex64::new(-2.7, 3.1);
        let lhs = (ln_gamma_complex(z + 1.0) - ln_gamma_complex(z)).exp();
        assert_relative_eq!(lhs.re, z.re, max_relative = 1e-12);
        assert_relative_eq!(lhs.im, z.im, max_relative = 1e-12);
    }

    #[test]
    fn contour_reproduces_bessel_reduction() {
        // G^{2,0}_{0,2}(x | b1, b2) = 2 x^{(b1+b2)/2} K_{b1-b2}(2√x)
        let p = MeijerParams::new(2, 0, &[], &[1.3, 0.4]).unwrap();
        for &x in &[0.05, 0.7, 3.0] {
            let g = meijer_g_contour(&p, x).unwrap().value;
            let k = crate::specfun::bessel_k(0.9, 2.0 * x.sqrt()).unwrap();
            assert_relative_eq!(g, 2.0 * x.powf(0.85) * k, max_relative = 1e-9);
        }
    }

    #[test]
    fn hairpin_matches_series() {
        assert_relative_eq!(hyp_pfq_contour(&[1.0], &[1.0], 1.5).unwrap(), 1.5f64.exp(), max_relative = 1e-9);
        let (a, b) = ([0.7], [1.2, 2.5, 0.9, 3.3]);
        for &z in &[-4.0, -0.3, 2.0] {
            assert_relative_eq!(hyp_pfq_contour(&a, &b, z).unwrap(), hyp_pfq(&a, &b, z).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = MeijerParams::new(2, 0, &[], &[1.0, 0.5]).unwrap();
        assert!(meijer_g_contour(&p, 0.0).is_err());
        assert!(hyp_pfq_contour(&[1.0, 2.0], &[1.0], 0.5).is_err());
    }
}
