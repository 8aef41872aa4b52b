//! Meijer G-function for the three parameter shapes that occur in the
//! secrecy expressions: G^{2,0}_{0,2}, G^{4,1}_{1,5} and G^{4,5}_{5,5}.
//!
//! G^{2,0}_{0,2} reduces to a Bessel K. The other two shapes are expanded by
//! Slater's theorem into Γ-weighted pFq series, one per lower parameter b_h,
//! h <= m. When two of those parameters differ by an integer the residues
//! collide; the parameters are then split by ±ε and the two results averaged,
//! which cancels the O(ε) error and leaves O(ε²).
//!
//! Slater sums cancel badly once the argument is large, or once the parameters
//! spread out. Both remaining shapes then have a structured form in the
//! parameter families used by the secrecy metrics:
//!
//! - G^{4,1}_{1,5}(x | 1+σ; σ+A/2, σ+(A+1)/2, σ+B/2, σ+(B+1)/2, σ) is
//!   x^σ π Γ(A)Γ(B) 2^{2-A-B} P(XY <= 4√x) for X ~ Gamma(A), Y ~ Gamma(B);
//! - G^{4,5}_{5,5} with the matching two-sided layout is the CDF of a ratio
//!   of two such products.
//!
//! With one integer shape both CDFs become finite sums (Bessel K terms and
//! Gauss 2F1 series with positive terms), which is what the fallback uses.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::specfun::bessel::{ln_bessel_k, ln_bessel_k_ladder};
use crate::specfun::gamma::{ln_gamma, ln_gamma_sign, CompensatedSum};
use crate::specfun::hypergeometric::hyp_pfq_series;

pub const DEFAULT_EPSILON_SHIFT: f64 = 1e-6;

/// Relative error estimate above which a Slater sum is rejected.
const SLATER_ACCEPT: f64 = 1e-8;
/// Rounding error per unit of condition number.
const ROUNDOFF: f64 = 1e-14;
const INT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    G20_02,
    G41_15,
    G45_55,
}

/// Validated parameter set for one of the supported shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerParams {
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    epsilon_shift: f64,
}

impl MeijerParams {
    pub fn new(m: usize, n: usize, a: &[f64], b: &[f64]) -> Result<Self> {
        Self::with_epsilon(m, n, a, b, DEFAULT_EPSILON_SHIFT)
    }

    pub fn with_epsilon(m: usize, n: usize, a: &[f64], b: &[f64], epsilon_shift: f64) -> Result<Self> {
        let (p, q) = (a.len(), b.len());
        match (m, n, p, q) {
            (2, 0, 0, 2) | (4, 1, 1, 5) | (4, 5, 5, 5) => {}
            _ => return Err(Error::UnsupportedShape { m, n, p, q }),
        }
        if !(epsilon_shift > 0.0 && epsilon_shift <= 1e-5) {
            return Err(Error::invalid(
                "epsilon_shift",
                format!("must lie in (0, 1e-5], got {epsilon_shift}"),
            ));
        }
        if a.iter().chain(b).any(|v| !v.is_finite()) {
            return Err(Error::invalid("a/b", "parameters must be finite"));
        }
        Ok(MeijerParams {
            m,
            n,
            a: a.to_vec(),
            b: b.to_vec(),
            epsilon_shift,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn epsilon_shift(&self) -> f64 {
        self.epsilon_shift
    }

    pub fn shape(&self) -> Shape {
        match self.m {
            2 => Shape::G20_02,
            _ if self.n == 1 => Shape::G41_15,
            _ => Shape::G45_55,
        }
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BesselReduction,
    Slater,
    /// Slater with ±ε pole splitting.
    SlaterSplit,
    /// Argument inversion followed by Slater.
    SlaterInverted,
    GammaProductCdf,
    GammaRatioCdf,
    /// Leading Slater terms only (small-argument asymptote).
    Leading,
}

/// A G value in sign/log form with an estimate of its relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerValue {
    pub ln_abs: f64,
    pub sign: f64,
    pub rel_error: f64,
    pub method: Method,
}

impl MeijerValue {
    pub fn value(&self) -> Result<f64> {
        if self.ln_abs > 709.0 {
            return Err(Error::Overflow("meijer_g"));
        }
        Ok(self.sign * self.ln_abs.exp())
    }

    /// An exact zero when no terms contributed; otherwise the terms
    /// cancelled completely and nothing is known about the value.
    fn zero(method: Method, magnitude: f64) -> Self {
        MeijerValue {
            ln_abs: f64::NEG_INFINITY,
            sign: 0.0,
            rel_error: if magnitude > 0.0 { f64::INFINITY } else { 0.0 },
            method,
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("must be positive and finite, got {x}")));
    }
    Ok(())
}

fn near_int(x: f64) -> bool {
    (x - x.round()).abs() < INT_TOL
}

/// G^{m,n}_{p,q}(x) for the supported shapes.
pub fn meijer_g(params: &MeijerParams, x: f64) -> Result<f64> {
    meijer_g_eval(params, x)?.value()
}

/// G in log form with diagnostics.
pub fn meijer_g_eval(params: &MeijerParams, x: f64) -> Result<MeijerValue> {
    check_x(x)?;
    match params.shape() {
        Shape::G20_02 => {
            let (b1, b2) = (params.b[0], params.b[1]);
            Ok(MeijerValue {
                ln_abs: LN_2 + 0.5 * (b1 + b2) * x.ln() + ln_bessel_k(b1 - b2, 2.0 * x.sqrt())?,
                sign: 1.0,
                rel_error: 1e-13,
                method: Method::BesselReduction,
            })
        }
        Shape::G41_15 => {
            let slater = meijer_g_slater(params, x);
            match slater {
                Ok(v) if v.rel_error <= SLATER_ACCEPT => Ok(v),
                _ => match product_family(params) {
                    Some(fam) => fam.eval(x),
                    None => Err(slater.err().unwrap_or_else(|| {
                        Error::no_convergence("meijer_g", format!("Slater sum lost precision at x = {x}"))
                    })),
                },
            }
        }
        Shape::G45_55 => {
            let slater = if x == 1.0 {
                Err(Error::no_convergence("meijer_g", "Slater series diverge at x = 1"))
            } else {
                meijer_g_slater(params, x)
            };
            match slater {
                Ok(v) if v.rel_error <= SLATER_ACCEPT => Ok(v),
                _ => match ratio_family(params) {
                    Some(fam) => fam.eval(x),
                    None => Err(slater.err().unwrap_or_else(|| {
                        Error::no_convergence("meijer_g", format!("Slater sum lost precision at x = {x}"))
                    })),
                },
            }
        }
    }
}

/// The residue (Slater) expansion alone, without structured fallbacks.
/// G^{4,5}_{5,5} with x > 1 is first mapped to G^{5,4}_{5,5}(1/x).
pub fn meijer_g_slater(params: &MeijerParams, x: f64) -> Result<MeijerValue> {
    check_x(x)?;
    match params.shape() {
        Shape::G20_02 => meijer_g_eval(params, x),
        Shape::G41_15 => split_slater(params.m, params.n, &params.a, &params.b, x, params.epsilon_shift, true),
        Shape::G45_55 => {
            if x < 1.0 {
                split_slater(params.m, params.n, &params.a, &params.b, x, params.epsilon_shift, true)
            } else if x > 1.0 {
                // G^{m,n}_{p,q}(x | a; b) = G^{n,m}_{q,p}(1/x | 1-b; 1-a)
                let a2: Vec<f64> = params.b.iter().map(|v| 1.0 - v).collect();
                let b2: Vec<f64> = params.a.iter().map(|v| 1.0 - v).collect();
                let mut v = split_slater(params.n, params.m, &a2, &b2, 1.0 / x, params.epsilon_shift, true)?;
                v.method = Method::SlaterInverted;
                Ok(v)
            } else {
                Err(Error::no_convergence("meijer_g", "Slater series diverge at x = 1"))
            }
        }
    }
}

/// Sum of the leading term of every residue series, Σ_h D_h x^{b_h}; the
/// small-x asymptote. Confluent parameters are split by ±ε as in the full sum.
pub fn meijer_g_leading(params: &MeijerParams, x: f64) -> Result<MeijerValue> {
    check_x(x)?;
    if params.shape() == Shape::G20_02 {
        return Err(Error::invalid("params", "leading-term form is defined for the Slater shapes"));
    }
    let mut v = split_slater(params.m, params.n, &params.a, &params.b, x, params.epsilon_shift, false)?;
    v.method = Method::Leading;
    Ok(v)
}

/// Whether any two of the first m lower parameters differ by an integer, or
/// a residue series would hit a lower-parameter pole.
pub fn is_confluent(m: usize, b: &[f64]) -> bool {
    for h in 0..m {
        for (j, &bj) in b.iter().enumerate() {
            if j == h {
                continue;
            }
            let d = bj - b[h];
            if j < m && near_int(d) {
                return true;
            }
            if j >= m && d > 0.5 && near_int(d) {
                return true;
            }
        }
    }
    false
}

struct Partial {
    ln_scale: f64,
    sum: f64,
    magnitude: f64,
}

/// Σ_h of Slater residue terms in scaled form: value = sum·e^{ln_scale}.
fn slater_raw(m: usize, n: usize, a: &[f64], b: &[f64], x: f64, full: bool) -> Result<Partial> {
    let (p, q) = (a.len(), b.len());
    let sign_z = if (p + m + n).is_multiple_of(2) { 1.0 } else { -1.0 };
    let lnx = x.ln();
    let mut terms: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(m);
    for h in 0..m {
        let bh = b[h];
        let mut ln_c = bh * lnx;
        let mut sign = 1.0;
        let mut vanishes = false;
        for j in 0..m {
            if j != h {
                let (l, s) = ln_gamma_sign(b[j] - bh)?;
                ln_c += l;
                sign *= s;
            }
        }
        for aj in &a[..n] {
            let (l, s) = ln_gamma_sign(1.0 + bh - aj)?;
            ln_c += l;
            sign *= s;
        }
        for bj in &b[m..] {
            match ln_gamma_sign(1.0 + bh - bj) {
                Ok((l, s)) => {
                    ln_c -= l;
                    sign *= s;
                }
                Err(Error::Pole(_)) => vanishes = true,
                Err(e) => return Err(e),
            }
        }
        for aj in &a[n..] {
            match ln_gamma_sign(aj - bh) {
                Ok((l, s)) => {
                    ln_c -= l;
                    sign *= s;
                }
                Err(Error::Pole(_)) => vanishes = true,
                Err(e) => return Err(e),
            }
        }
        if vanishes {
            continue;
        }
        let (value, magnitude) = if full {
            let upper: Vec<f64> = a.iter().map(|aj| 1.0 + bh - aj).collect();
            let lower: Vec<f64> = (0..q).filter(|&j| j != h).map(|j| 1.0 + bh - b[j]).collect();
            let s = hyp_pfq_series(&upper, &lower, sign_z * x)?;
            (s.value, s.magnitude)
        } else {
            (1.0, 1.0)
        };
        terms.push((ln_c, sign, value, magnitude));
    }
    if terms.is_empty() {
        return Ok(Partial {
            ln_scale: 0.0,
            sum: 0.0,
            magnitude: 0.0,
        });
    }
    let scale = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = CompensatedSum::new();
    let mut magnitude = 0.0;
    for (ln_c, sign, value, mag) in terms {
        let w = (ln_c - scale).exp();
        sum.add(sign * w * value);
        magnitude += w * mag;
    }
    Ok(Partial {
        ln_scale: scale,
        sum: sum.value(),
        magnitude,
    })
}

fn split_slater(m: usize, n: usize, a: &[f64], b: &[f64], x: f64, eps: f64, full: bool) -> Result<MeijerValue> {
    let method = if full { Method::Slater } else { Method::Leading };
    if !is_confluent(m, b) {
        let r = slater_raw(m, n, a, b, x, full)?;
        if r.sum == 0.0 {
            return Ok(MeijerValue::zero(method, r.magnitude));
        }
        return Ok(MeijerValue {
            ln_abs: r.sum.abs().ln() + r.ln_scale,
            sign: r.sum.signum(),
            rel_error: ROUNDOFF * r.magnitude / r.sum.abs(),
            method,
        });
    }
    let shifted = |s: f64| -> Vec<f64> {
        b.iter()
            .enumerate()
            .map(|(j, &v)| if j < m { v + s * (j + 1) as f64 * eps } else { v })
            .collect()
    };
    let plus = slater_raw(m, n, a, &shifted(1.0), x, full)?;
    let minus = slater_raw(m, n, a, &shifted(-1.0), x, full)?;
    let scale = plus.ln_scale.max(minus.ln_scale);
    let wp = (plus.ln_scale - scale).exp();
    let wm = (minus.ln_scale - scale).exp();
    let vp = plus.sum * wp;
    let vm = minus.sum * wm;
    let avg = 0.5 * (vp + vm);
    let magnitude = 0.5 * (plus.magnitude * wp + minus.magnitude * wm);
    if avg == 0.0 {
        return Ok(MeijerValue::zero(if full { Method::SlaterSplit } else { method }, magnitude));
    }
    // the ±ε difference measures the first-order shift; the averaged value
    // retains a second-order remainder of roughly ε/gap times that, with
    // parameter gaps no smaller than 1/4 in the supported families
    let split = 0.5 * (vp - vm).abs() * 4.0 * eps;
    // parameter differences near a pole are known only to about ulp(b)/ε
    let bmax = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let rounding = ROUNDOFF + 2.0 * f64::EPSILON * bmax / eps;
    let rel_error = (split + rounding * magnitude) / avg.abs();
    Ok(MeijerValue {
        ln_abs: avg.abs().ln() + scale,
        sign: avg.signum(),
        rel_error,
        method: if full { Method::SlaterSplit } else { method },
    })
}

// ---------------------------------------------------------------------------
// Structured families

/// Splits four values into two pairs {s, s+1/2}; returns (2·s1, 2·s2).
fn half_pairs(v: &[f64]) -> Option<(f64, f64)> {
    debug_assert_eq!(v.len(), 4);
    for j in 1..4 {
        let (i, k) = (0, j);
        let d = v[k] - v[i];
        if (d.abs() - 0.5).abs() < INT_TOL {
            let rest: Vec<usize> = (1..4).filter(|&r| r != j).collect();
            let d2 = v[rest[1]] - v[rest[0]];
            if (d2.abs() - 0.5).abs() < INT_TOL {
                let s1 = v[i].min(v[k]);
                let s2 = v[rest[0]].min(v[rest[1]]);
                return Some((2.0 * s1, 2.0 * s2));
            }
        }
    }
    None
}

fn as_positive_int(x: f64) -> Option<usize> {
    if x > 0.5 && near_int(x) && x < 1e6 {
        Some(x.round() as usize)
    } else {
        None
    }
}

/// (shape, integer shape) with the integer preferred small.
fn pick_integer(s1: f64, s2: f64) -> Option<(f64, usize)> {
    match (as_positive_int(s1), as_positive_int(s2)) {
        (Some(n1), Some(n2)) => Some(if n1 <= n2 { (s2, n1) } else { (s1, n2) }),
        (Some(n1), None) => Some((s2, n1)),
        (None, Some(n2)) => Some((s1, n2)),
        (None, None) => None,
    }
}

struct ProductFamily {
    sigma: f64,
    shape: f64,
    int_shape: usize,
}

fn product_family(params: &MeijerParams) -> Option<ProductFamily> {
    let sigma = params.b[4];
    if (params.a[0] - 1.0 - sigma).abs() > INT_TOL {
        return None;
    }
    let c: Vec<f64> = params.b[..4].iter().map(|v| v - sigma).collect();
    let (s1, s2) = half_pairs(&c)?;
    if !(s1 > 0.0 && s2 > 0.0) {
        return None;
    }
    let (shape, int_shape) = pick_integer(s1, s2)?;
    Some(ProductFamily {
        sigma,
        shape,
        int_shape,
    })
}

impl ProductFamily {
    fn eval(&self, x: f64) -> Result<MeijerValue> {
        let w = 4.0 * x.sqrt();
        let cdf = gamma_product_cdf(self.shape, self.int_shape, w)?;
        if cdf.cdf <= 0.0 {
            return Ok(MeijerValue::zero(Method::GammaProductCdf, 0.0));
        }
        let nf = self.int_shape as f64;
        let ln_pref = PI.ln() + ln_gamma(self.shape)? + ln_gamma(nf)? - (self.shape + nf - 2.0) * LN_2;
        Ok(MeijerValue {
            ln_abs: self.sigma * x.ln() + ln_pref + cdf.cdf.ln(),
            sign: 1.0,
            rel_error: cdf.abs_error / cdf.cdf + 1e-13,
            method: Method::GammaProductCdf,
        })
    }
}

/// CDF of a product of independent Gamma variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductCdf {
    pub cdf: f64,
    pub complement: f64,
    pub abs_error: f64,
}

/// Below this the CDF is not taken as 1 minus the complement.
const SMALL_CDF: f64 = 1e-3;
/// Hard cap on terms of the slowly decaying upper series.
const UPPER_TERMS: usize = 2_000_000;

/// P(XY <= w) with X ~ Gamma(shape, 1), Y ~ Gamma(n, 1), n a positive integer.
///
/// With T_j = 2 w^{(A+j)/2} K_{A-j}(2√w) / (j! Γ(A)), the complement is the
/// finite sum Σ_{j<n} T_j. When the CDF itself is small it is taken from the
/// small-argument residue series of the equivalent G^{4,1}_{1,5}, and failing
/// that from the upper series Σ_{j>=n} T_j.
pub fn gamma_product_cdf(shape: f64, n: usize, w: f64) -> Result<ProductCdf> {
    Ok(product_cdf_range(shape, n, n, w)?[0])
}

/// P(XY <= w) for Y-shapes n = 1..=n_max at once (entry n-1), sharing one
/// set of Poisson-Bessel terms.
pub fn gamma_product_cdf_all(shape: f64, n_max: usize, w: f64) -> Result<Vec<f64>> {
    Ok(product_cdf_range(shape, 1, n_max, w)?.into_iter().map(|c| c.cdf).collect())
}

fn product_cdf_range(shape: f64, n_lo: usize, n_hi: usize, w: f64) -> Result<Vec<ProductCdf>> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::invalid("shape", format!("must be positive, got {shape}")));
    }
    if n_lo == 0 || n_hi < n_lo {
        return Err(Error::invalid("n", "integer shape must be at least 1"));
    }
    if w.is_nan() || w < 0.0 {
        return Err(Error::invalid("w", format!("must be non-negative, got {w}")));
    }
    let count = n_hi - n_lo + 1;
    if w == 0.0 || w.is_infinite() {
        let cdf = if w == 0.0 { 0.0 } else { 1.0 };
        return Ok(vec![
            ProductCdf {
                cdf,
                complement: 1.0 - cdf,
                abs_error: 0.0,
            };
            count
        ]);
    }
    let terms = PoissonBessel::new(shape, w)?;
    let t: Vec<f64> = (0..n_hi).map(|j| terms.term(j)).collect::<Result<_>>()?;
    let mut out: Vec<Option<ProductCdf>> = vec![None; count];
    let mut comp = CompensatedSum::new();
    let mut need_upper = false;
    for n in 1..=n_hi {
        comp.add(t[n - 1]);
        if n < n_lo {
            continue;
        }
        let c = comp.value();
        let slot = &mut out[n - n_lo];
        if 1.0 - c >= SMALL_CDF {
            *slot = Some(ProductCdf {
                cdf: 1.0 - c,
                complement: c,
                abs_error: 1e-15,
            });
        } else if let Some((cdf, err)) = product_cdf_slater(shape, n, w) {
            *slot = Some(ProductCdf {
                cdf,
                complement: 1.0 - cdf,
                abs_error: err,
            });
        } else {
            need_upper = true;
        }
    }
    if need_upper {
        let (mut upper, tail) = upper_series(&terms, shape, n_hi, w)?;
        // walk down: the upper sum for n is T_n + ... + T_{n_hi-1} + tail
        for n in (n_lo..=n_hi).rev() {
            let slot = &mut out[n - n_lo];
            if slot.is_none() {
                let cdf = upper.value();
                *slot = Some(ProductCdf {
                    cdf,
                    complement: 1.0 - cdf,
                    abs_error: tail + 1e-15 * cdf,
                });
            }
            if n > 1 {
                upper.add(t[n - 1]);
            }
        }
    }
    Ok(out.into_iter().map(|c| c.expect("every slot is filled")).collect())
}

/// Σ_{j>=n} T_j and an estimate of the neglected tail. For large j the terms
/// decay like j^{-A-1}, so the tail beyond j is about T_j·(j+1)/A.
fn upper_series(terms: &PoissonBessel, shape: f64, n: usize, w: f64) -> Result<(CompensatedSum, f64)> {
    let mut upper = CompensatedSum::new();
    let mut prev = f64::INFINITY;
    let mut j = n;
    loop {
        let tj = terms.term(j)?;
        upper.add(tj);
        let tail = tj * (j as f64 + 1.0) / shape;
        let settled = (j as f64) > shape && tj <= prev;
        if settled && tail <= 1e-16 * upper.value() {
            return Ok((upper, 0.0));
        }
        prev = tj;
        j += 1;
        if j > n + UPPER_TERMS {
            if settled && tail <= 1e-8 * upper.value() {
                return Ok((upper, tail));
            }
            return Err(Error::no_convergence(
                "gamma_product_cdf",
                format!("upper series did not settle (shape {shape}, w {w})"),
            ));
        }
    }
}

/// Small CDF values from the residue series of
/// G^{4,1}_{1,5}(w²/16 | 1 - (A+n)/4; (A-n)/4, (A-n+2)/4, (n-A)/4, (n-A+2)/4, -(A+n)/4).
fn product_cdf_slater(shape: f64, n: usize, w: f64) -> Option<(f64, f64)> {
    let nf = n as f64;
    let v = shape - nf;
    let s = 0.25 * (shape + nf);
    let a = [1.0 - s];
    let b = [0.25 * v, 0.25 * (v + 2.0), -0.25 * v, 0.25 * (2.0 - v), -s];
    let x = w * w / 16.0;
    let g = split_slater(4, 1, &a, &b, x, DEFAULT_EPSILON_SHIFT, true).ok()?;
    if g.sign <= 0.0 || g.rel_error > 1e-9 {
        return None;
    }
    let ln_pref = (shape + nf - 2.0) * LN_2 - PI.ln() - ln_gamma(shape).ok()? - ln_gamma(nf).ok()?;
    let cdf = (ln_pref + s * x.ln() + g.ln_abs).exp();
    if !(cdf > 0.0 && cdf < 1.0) {
        return None;
    }
    Some((cdf, cdf * g.rel_error))
}

/// Terms T_j of the Poisson-Bessel mixture, built on two Bessel ladders
/// covering the orders |A - j|.
struct PoissonBessel {
    shape: f64,
    lnw: f64,
    y: f64,
    ln_gamma_shape: f64,
    n1: usize,
    down: Vec<f64>,
    up: std::cell::RefCell<Vec<f64>>,
    up_base: f64,
}

impl PoissonBessel {
    fn new(shape: f64, w: f64) -> Result<Self> {
        let y = 2.0 * w.sqrt();
        let n1 = (shape + 0.5).floor();
        let f1 = shape - n1;
        let down = ln_bessel_k_ladder(f1, n1 as usize, y)?;
        let up_base = -f1;
        let up = ln_bessel_k_ladder(up_base, 64, y)?;
        Ok(PoissonBessel {
            shape,
            lnw: w.ln(),
            y,
            ln_gamma_shape: ln_gamma(shape)?,
            n1: n1 as usize,
            down,
            up: std::cell::RefCell::new(up),
            up_base,
        })
    }

    /// ln K_{|A - j|}(y).
    fn ln_k(&self, j: usize) -> Result<f64> {
        if j <= self.n1 {
            return Ok(self.down[self.n1 - j]);
        }
        let idx = j - self.n1;
        let mut up = self.up.borrow_mut();
        if idx >= up.len() {
            *up = ln_bessel_k_ladder(self.up_base, 2 * idx + 64, self.y)?;
        }
        Ok(up[idx])
    }

    fn term(&self, j: usize) -> Result<f64> {
        let jf = j as f64;
        let l = LN_2 + 0.5 * (self.shape + jf) * self.lnw + self.ln_k(j)? - ln_gamma(jf + 1.0)? - self.ln_gamma_shape;
        Ok(l.exp())
    }
}

struct RatioFamily {
    sigma: f64,
    /// W1 = X1·Y1 with shapes (a1, b1); W2 with shapes (a2, b2)
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
}

fn ratio_family(params: &MeijerParams) -> Option<RatioFamily> {
    let sigma = params.b[4];
    let one = params.a.iter().position(|v| (v - 1.0 - sigma).abs() < INT_TOL)?;
    let rest: Vec<f64> = params
        .a
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != one)
        .map(|(_, v)| v - sigma)
        .collect();
    let (lo1, lo2) = half_pairs(&rest)?;
    // pair {1 - s/2, (1 - s)/2} has smaller element (1 - s)/2 = lo/2
    let a2 = 1.0 - lo1;
    let b2 = 1.0 - lo2;
    let c: Vec<f64> = params.b[..4].iter().map(|v| v - sigma).collect();
    let (a1, b1) = half_pairs(&c)?;
    if !(a1 > 0.0 && b1 > 0.0 && a2 > 0.0 && b2 > 0.0) {
        return None;
    }
    Some(RatioFamily { sigma, a1, b1, a2, b2 })
}

impl RatioFamily {
    fn eval(&self, x: f64) -> Result<MeijerValue> {
        let r = x.sqrt();
        let (cdf, abs_error) = gamma_ratio_cdf(self.a1, self.b1, self.a2, self.b2, r)?;
        if cdf <= 0.0 {
            return Ok(MeijerValue::zero(Method::GammaRatioCdf, 0.0));
        }
        let ln_pref = 2.0 * PI.ln() + ln_gamma(self.a1)? + ln_gamma(self.b1)? + ln_gamma(self.a2)? + ln_gamma(self.b2)?
            - (self.a1 + self.b1 + self.a2 + self.b2 - 4.0) * LN_2;
        Ok(MeijerValue {
            ln_abs: self.sigma * x.ln() + ln_pref + cdf.ln(),
            sign: 1.0,
            rel_error: abs_error / cdf + 1e-13,
            method: Method::GammaRatioCdf,
        })
    }
}

/// P(X1 Y1 < r X2 Y2) for independent Gamma variables with shapes
/// (a1, b1, a2, b2), at least one of them a positive integer.
/// Returns (probability, absolute error estimate).
pub fn gamma_ratio_cdf(a1: f64, b1: f64, a2: f64, b2: f64, r: f64) -> Result<(f64, f64)> {
    for (name, v) in [("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(name, format!("shape must be positive, got {v}")));
        }
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("r", format!("must be positive and finite, got {r}")));
    }
    if let Some((shape, n)) = pick_integer(a1, b1) {
        let s = ratio_upper(shape, n, a2, b2, r)?;
        return Ok((1.0 - s, 1e-14));
    }
    if let Some((shape, n)) = pick_integer(a2, b2) {
        // P(W1 < r W2) = P(W2 > W1 / r)
        let s = ratio_upper(shape, n, a1, b1, 1.0 / r)?;
        return Ok((s, 1e-14 * s.max(1e-300)));
    }
    Err(Error::no_convergence(
        "gamma_ratio_cdf",
        "no integer shape; no finite representation available",
    ))
}

/// P(X1 Y1 >= r X2 Y2) for Y1 ~ Gamma(n), n integer:
/// Σ_{j<n} Γ(B+j)/(j!Γ(B)) r^j B(A2+j, A1+B)/B(A2, A1) 2F1(B+j, A2+j; A1+A2+B+j; 1-r),
/// with (A1, A2, B) = (shape1, a2, b2) and Pfaff's transformation for r > 1.
fn ratio_upper(shape1: f64, n: usize, a2: f64, b2: f64, r: f64) -> Result<f64> {
    let lnr = r.ln();
    let ln_beta = |p: f64, q: f64| -> Result<f64> { Ok(ln_gamma(p)? + ln_gamma(q)? - ln_gamma(p + q)?) };
    let base = ln_beta(a2, shape1)?;
    let lg_b2 = ln_gamma(b2)?;
    let mut sum = CompensatedSum::new();
    for j in 0..n {
        let jf = j as f64;
        let ln_c = ln_gamma(b2 + jf)? - lg_b2 - ln_gamma(jf + 1.0)? + jf * lnr + ln_beta(a2 + jf, shape1 + b2)? - base;
        let (alpha, beta, gamma) = (b2 + jf, a2 + jf, shape1 + a2 + b2 + jf);
        let (ln_f, ln_extra) = if r <= 1.0 {
            let s = hyp_pfq_series(&[alpha, beta], &[gamma], 1.0 - r)?;
            (s.value.ln(), 0.0)
        } else {
            // 2F1(α,β;γ;z) = (1-z)^{-α} 2F1(α, γ-β; γ; z/(z-1)), 1 - z = r
            let s = hyp_pfq_series(&[alpha, gamma - beta], &[gamma], 1.0 - 1.0 / r)?;
            (s.value.ln(), -alpha * lnr)
        };
        sum.add((ln_c + ln_f + ln_extra).exp());
    }
    Ok(sum.value())
}
