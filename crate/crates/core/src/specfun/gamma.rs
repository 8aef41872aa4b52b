//! Log-gamma, gamma and a few companions.
//!
//! `ln_gamma` uses a Taylor expansion of ln Γ(1 + e) around the two zeros of
//! the function (x = 1, 2), the Stirling series for x >= 15 with upward
//! shifting below that, and reflection for x < 1/2.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// ζ(2) ..= ζ(39).
const ZETA: [f64; 38] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_37,
    1.017_343_061_984_449,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926,
    1.000_000_059_608_189,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
    1.000_000_000_465_663,
    1.000_000_000_232_831_2,
    1.000_000_000_116_415_5,
    1.000_000_000_058_207_7,
    1.000_000_000_029_103_9,
    1.000_000_000_014_552,
    1.000_000_000_007_276,
    1.000_000_000_003_638,
    1.000_000_000_001_819,
];

/// B_{2k} / (2k (2k - 1)) for k = 1..=9.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
];

/// `sin(pi x)` with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// ln Γ(1 + e) for |e| <= 1/4.
fn ln_gamma1p_small(e: f64) -> f64 {
    // ln Γ(1+e) = -γ e + Σ_{k>=2} (-1)^k ζ(k) e^k / k
    let mut acc = 0.0;
    let mut pow = -e;
    for (i, z) in ZETA.iter().enumerate() {
        let k = (i + 2) as f64;
        pow *= -e;
        acc += z * pow / k;
    }
    acc - EULER_GAMMA * e
}

fn ln_gamma_stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series
}

/// ln Γ(x) for x >= 1/2.
fn ln_gamma_pos(x: f64) -> f64 {
    if (x - 1.0).abs() <= 0.25 {
        return ln_gamma1p_small(x - 1.0);
    }
    if (x - 2.0).abs() <= 0.25 {
        let e = x - 2.0;
        return ln_gamma1p_small(e) + e.ln_1p();
    }
    if x >= 15.0 {
        return ln_gamma_stirling(x);
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < 15.0 {
        prod *= z;
        z += 1.0;
    }
    ln_gamma_stirling(z) - prod.ln()
}

/// ln |Γ(x)| together with the sign of Γ(x).
pub fn ln_gamma_sign(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return Err(Error::invalid("x", "NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let s = sin_pi(x);
    let lg = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((lg, s.signum()))
}

/// ln |Γ(x)|.
pub fn ln_gamma(x: f64) -> Result<f64> {
    ln_gamma_sign(x).map(|(l, _)| l)
}

/// Γ(x). Overflows to ±inf past x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    let (l, s) = ln_gamma_sign(x)?;
    Ok(s * l.exp())
}

/// 1/Γ(x), zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    match ln_gamma_sign(x) {
        Ok((l, s)) => s * (-l).exp(),
        Err(_) => 0.0,
    }
}

/// ln |(a)_n| and its sign for the Pochhammer symbol (a)_n = Γ(a+n)/Γ(a).
pub fn ln_pochhammer_sign(a: f64, n: f64) -> Result<(f64, f64)> {
    let (num, sn) = ln_gamma_sign(a + n)?;
    let (den, sd) = ln_gamma_sign(a)?;
    Ok((num - den, sn * sd))
}

/// ln C(n, k) for real n, integer k with 0 <= k <= n.
pub fn ln_binomial(n: f64, k: f64) -> Result<f64> {
    Ok(ln_gamma(n + 1.0)? - ln_gamma(k + 1.0)? - ln_gamma(n - k + 1.0)?)
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of absolute values of everything added so far.
    pub fn magnitude(&self) -> f64 {
        self.abs
    }

    /// Ratio of the summed magnitudes to the magnitude of the result.
    pub fn condition(&self) -> f64 {
        let v = self.value().abs();
        if v == 0.0 {
            if self.abs == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs / v
        }
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
