//! Gauss rules for the half-range Hermite weight e^{-x²} on [0, ∞).
//!
//! The three-term recurrence is obtained from the exact moments
//! m_j = Γ((j+1)/2) / 2 with the Chebyshev algorithm. That map is badly
//! conditioned, so it runs in 2048-bit fixed point; only the final recurrence
//! coefficients are rounded to f64. Nodes are eigenvalues of the Jacobi
//! matrix (Golub-Welsch), polished by Newton steps on the recurrence, and
//! weights are Christoffel numbers 1 / Σ p_k(x)² so that tiny weights keep
//! full relative accuracy.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported rule order.
pub const MAX_ORDER: usize = 64;

const FRAC_BITS: u64 = 2048;

/// An L-point rule for ∫_0^∞ e^{-x²} f(x) dx.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Abscissas, strictly increasing and positive.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Σ w_i f(s_i).
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(s, w)| w * f(s)).sum()
    }
}

/// Fixed-point number with FRAC_BITS fractional bits.
#[derive(Clone, Debug)]
struct Fixed(BigInt);

impl Fixed {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Fixed {
        Fixed((num << FRAC_BITS) / den)
    }

    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> FRAC_BITS)
    }

    fn div(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 << FRAC_BITS) / &o.0)
    }

    fn sub(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }

    fn to_f64(&self) -> f64 {
        // keep 120 significant bits before converting
        let bits = self.0.bits();
        if bits <= 120 {
            self.0.to_f64().unwrap_or(f64::NAN) / 2f64.powi(FRAC_BITS as i32)
        } else {
            let shift = bits - 120;
            let top = (&self.0 >> shift).to_f64().unwrap_or(f64::NAN);
            top * 2f64.powf(shift as f64 - FRAC_BITS as f64)
        }
    }
}

/// arctan(1/n) in fixed point via its alternating Taylor series.
fn arctan_inv(n: u64, guard: u64) -> BigInt {
    let one = BigInt::one() << (FRAC_BITS + guard);
    let n_big = BigInt::from(n);
    let n2 = &n_big * &n_big;
    let mut power = &one / &n_big;
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power = &power / &n2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

fn sqrt_pi_fixed() -> Fixed {
    const GUARD: u64 = 64;
    // Machin: π = 16 atan(1/5) - 4 atan(1/239)
    let pi = arctan_inv(5, GUARD) * 16 - arctan_inv(239, GUARD) * 4;
    let pi: BigInt = pi >> GUARD;
    Fixed((pi << FRAC_BITS).sqrt())
}

/// Exact moments m_0..m_{count-1} of e^{-x²} on [0, ∞).
fn half_range_moments(count: usize) -> Vec<Fixed> {
    let sqrt_pi = sqrt_pi_fixed();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        if j % 2 == 1 {
            // Γ(i + 1)/2 with j = 2i + 1
            let i = (j - 1) / 2;
            let mut f = BigInt::one();
            for k in 2..=i {
                f *= k;
            }
            out.push(Fixed(f << (FRAC_BITS - 1)));
        } else {
            // Γ(i + 1/2)/2 = √π (2i)! / (4^i i! 2)
            let i = j / 2;
            let mut num = BigInt::one();
            for k in (i + 1)..=(2 * i) {
                num *= k;
            }
            let den = BigInt::from(2) * (BigInt::one() << (2 * i));
            out.push(Fixed::from_ratio(&num, &den).mul(&sqrt_pi));
        }
    }
    out
}

/// Recurrence coefficients (a_k, b_k), k < n, of the monic orthogonal
/// polynomials: p_{k+1} = (x - a_k) p_k - b_k p_{k-1}, with b_0 = m_0.
fn recurrence(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let moments = half_range_moments(2 * n);
    let zero = Fixed(BigInt::zero());
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut sig_prev: Vec<Fixed> = vec![zero.clone(); 2 * n];
    let mut sig: Vec<Fixed> = moments.clone();
    let mut ak = moments[1].div(&moments[0]);
    let mut bk = moments[0].clone();
    a.push(ak.to_f64());
    b.push(bk.to_f64());
    for k in 1..n {
        let mut next = vec![zero.clone(); 2 * n];
        for l in k..(2 * n - k) {
            next[l] = sig[l + 1].sub(&ak.mul(&sig[l])).sub(&bk.mul(&sig_prev[l]));
        }
        if !next[k].0.is_positive() {
            return Err(Error::no_convergence(
                "half-range Gauss rule",
                format!("moment recurrence broke down at k = {k}; use a lower order"),
            ));
        }
        let a_new = next[k + 1].div(&next[k]).sub(&sig[k].div(&sig[k - 1]));
        let b_new = next[k].div(&sig[k - 1]);
        sig_prev = sig;
        sig = next;
        ak = a_new;
        bk = b_new;
        a.push(ak.to_f64());
        b.push(bk.to_f64());
    }
    Ok((a, b))
}

/// Orthonormal polynomial values p̃_0..p̃_{n-1} at x, and the derivative of
/// p̃_n (up to a constant) for Newton polishing.
fn orthonormal_values(a: &[f64], b: &[f64], x: f64) -> (Vec<f64>, f64, f64) {
    let n = a.len();
    let mut p = Vec::with_capacity(n + 1);
    let mut dp = Vec::with_capacity(n + 1);
    p.push(1.0 / b[0].sqrt());
    dp.push(0.0);
    let mut prev = 0.0;
    let mut dprev = 0.0;
    for k in 0..n {
        let sb_next = if k + 1 < n { b[k + 1].sqrt() } else { 1.0 };
        let sb = if k == 0 { 0.0 } else { b[k].sqrt() };
        let cur = p[k];
        let dcur = dp[k];
        let nxt = ((x - a[k]) * cur - sb * prev) / sb_next;
        let dnxt = (cur + (x - a[k]) * dcur - sb * dprev) / sb_next;
        prev = cur;
        dprev = dcur;
        p.push(nxt);
        dp.push(dnxt);
    }
    let pn = p[n];
    let dpn = dp[n];
    p.truncate(n);
    (p, pn, dpn)
}

fn build_rule(n: usize) -> Result<QuadratureRule> {
    let (a, b) = recurrence(n)?;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = a[i];
        if i + 1 < n {
            let off = b[i + 1].sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.total_cmp(y));
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (_, pn, dpn) = orthonormal_values(&a, &b, *x);
            if dpn == 0.0 {
                break;
            }
            let step = pn / dpn;
            *x -= step;
            if step.abs() <= 1e-17 * x.abs() {
                break;
            }
        }
        let (p, _, _) = orthonormal_values(&a, &b, *x);
        let s: f64 = p.iter().map(|v| v * v).sum();
        weights.push(1.0 / s);
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) || nodes[0] <= 0.0 {
        return Err(Error::no_convergence(
            "half-range Gauss rule",
            format!("nodes not strictly increasing and positive for L = {n}"),
        ));
    }
    Ok(QuadratureRule { nodes, weights })
}

fn cache() -> &'static RwLock<HashMap<usize, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The L-point Gauss rule for the weight e^{-x²} on [0, ∞), 1 <= L <= 64.
/// Rules are cached per order.
pub fn halfrange_gauss_rule(order: usize) -> Result<Arc<QuadratureRule>> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::invalid("quad_order", format!("must be in 1..={MAX_ORDER}, got {order}")));
    }
    if let Some(rule) = cache().read().expect("rule cache poisoned").get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule(order)?);
    let mut guard = cache().write().expect("rule cache poisoned");
    Ok(Arc::clone(guard.entry(order).or_insert(rule)))
}

/// Uncached construction; identical to the cached result.
pub fn halfrange_gauss_rule_uncached(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::invalid("quad_order", format!("must be in 1..={MAX_ORDER}, got {order}")));
    }
    build_rule(order)
}

/// Gauss rule for E[f(X)], X ~ Gamma(shape, 1): generalized Gauss-Laguerre
/// with probability weights (Σ w = 1), built by Golub-Welsch.
pub fn gamma_gauss_rule(shape: f64, order: usize) -> Result<QuadratureRule> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::invalid("shape", format!("must be positive and finite, got {shape}")));
    }
    if order == 0 || order > 4 * MAX_ORDER {
        return Err(Error::invalid("order", format!("must be in 1..={}, got {order}", 4 * MAX_ORDER)));
    }
    let n = order;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        jac[(j, j)] = 2.0 * j as f64 + shape;
        if j + 1 < n {
            let k = (j + 1) as f64;
            let off = (k * (k + shape - 1.0)).sqrt();
            jac[(j, j + 1)] = off;
            jac[(j + 1, j)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().map(|(x, w)| (x, w / total)).unzip();
    if nodes[0] <= 0.0 || nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::no_convergence(
            "gamma Gauss rule",
            format!("degenerate nodes for shape {shape}, order {n}"),
        ));
    }
    Ok(QuadratureRule { nodes, weights })
}
