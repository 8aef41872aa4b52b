use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use super::{CorrelatedLink, LosSpec, MalagaParams};
use crate::error::{Error, Result};

/// Samples per independent RNG stream.
const CHUNK: usize = 1 << 16;

/// Seeded realizations of the correlated SNR pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub count: usize,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub meta: CorrelatedLink,
}

struct Draw<'a> {
    params: &'a MalagaParams,
    rho: f64,
    mixing: Option<Gamma<f64>>,
    shadow: Gamma<f64>,
    diffuse_sd: f64,
}

impl<'a> Draw<'a> {
    fn new(params: &'a MalagaParams, rho: f64) -> Result<Self> {
        let r2 = rho * rho;
        let mixing = if r2 > 0.0 {
            Some(Gamma::new(params.alpha(), r2 / (1.0 - r2)).map_err(|e| Error::invalid("alpha", e.to_string()))?)
        } else {
            None
        };
        let beta = params.beta() as f64;
        Ok(Draw {
            params,
            rho,
            mixing,
            shadow: Gamma::new(beta, 1.0 / beta).map_err(|e| Error::invalid("beta", e.to_string()))?,
            diffuse_sd: (0.5 * params.xi()).sqrt(),
        })
    }

    /// Kibble pair with marginals Gamma(α, Ω/α).
    fn large_scale<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let t = match &self.mixing {
            Some(g) => {
                let lam: f64 = g.sample(rng);
                if lam > 0.0 {
                    Poisson::new(lam).map(|p| p.sample(rng)).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            None => 0.0,
        };
        let theta = self.params.omega() / self.params.alpha();
        let scale = theta * (1.0 - self.rho * self.rho);
        let g = Gamma::new(self.params.alpha() + t, scale).expect("shape and scale are positive");
        (g.sample(rng), g.sample(rng))
    }

    /// Málaga small-scale power: shadowed LOS plus diffuse scatter.
    fn small_scale<R: Rng>(&self, rng: &mut R) -> f64 {
        let g: f64 = self.shadow.sample(rng);
        let amp = (g * self.params.omega1()).sqrt();
        let phase = 2.0 * PI * rng.random::<f64>();
        let nr: f64 = rng.sample(StandardNormal);
        let ni: f64 = rng.sample(StandardNormal);
        let re = amp * phase.cos() + self.diffuse_sd * nr;
        let im = amp * phase.sin() + self.diffuse_sd * ni;
        re * re + im * im
    }
}

/// E{I²} of the unconditional irradiance.
fn irradiance_second_moment(params: &MalagaParams) -> f64 {
    let theta = params.omega() / params.alpha();
    let s = (params.xi() * params.beta() as f64 + params.omega1()) / params.beta() as f64;
    let k = params.kappa();
    theta * theta * s * s * k * k
}

fn chunked<T: Send, F>(count: usize, seed: u64, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<T> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            f(&mut rng, n)
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Draw `count` correlated SNR pairs. Bitwise reproducible for a fixed seed
/// regardless of thread count.
pub fn sample_pair(link: &CorrelatedLink, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let draw = Draw::new(link.params(), link.rho())?;
    let norm = irradiance_second_moment(link.params());
    let (mu1, mu2) = (link.mu1(), link.mu2());
    let pairs = chunked(count, seed, |rng, n| {
        (0..n)
            .map(|_| {
                let (x1, x2) = draw.large_scale(rng);
                let i1 = x1 * draw.small_scale(rng);
                let i2 = x2 * draw.small_scale(rng);
                (mu1 * i1 * i1 / norm, mu2 * i2 * i2 / norm)
            })
            .collect()
    });
    let (gamma1, gamma2) = pairs.into_iter().unzip();
    Ok(SampleBatch {
        seed,
        count,
        gamma1,
        gamma2,
        meta: *link,
    })
}

/// Draw `count` large-scale pairs (X_D, X_E) alone.
pub fn sample_large_scale(link: &CorrelatedLink, count: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let draw = Draw::new(link.params(), link.rho())?;
    let pairs = chunked(count, seed, |rng, n| (0..n).map(|_| draw.large_scale(rng)).collect());
    Ok(pairs.into_iter().unzip())
}

impl SampleBatch {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.count * 44 + 16);
        s.push_str("gamma1,gamma2\n");
        for (a, b) in self.gamma1.iter().zip(&self.gamma2) {
            let _ = writeln!(s, "{a:?},{b:?}");
        }
        s
    }

    pub fn to_meta(&self) -> String {
        let p = self.meta.params();
        let mut s = String::new();
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "count={}", self.count);
        let _ = writeln!(s, "alpha={:?}", p.alpha());
        let _ = writeln!(s, "beta={}", p.beta());
        let _ = writeln!(s, "b0={:?}", p.b0());
        let _ = writeln!(s, "delta={:?}", p.delta());
        let _ = writeln!(s, "omega={:?}", p.omega());
        match p.los() {
            LosSpec::Omega1(o) => {
                let _ = writeln!(s, "omega1={o:?}");
            }
            LosSpec::Components {
                omega_prime,
                phi_a,
                phi_b,
            } => {
                let _ = writeln!(s, "omega_prime={omega_prime:?}");
                let _ = writeln!(s, "phi_a={phi_a:?}");
                let _ = writeln!(s, "phi_b={phi_b:?}");
            }
        }
        let _ = writeln!(s, "mu1={:?}", self.meta.mu1());
        let _ = writeln!(s, "mu2={:?}", self.meta.mu2());
        let _ = writeln!(s, "rho={:?}", self.meta.rho());
        s
    }

    /// Sidecar path: the CSV path with `.meta` appended.
    pub fn meta_path(csv: &Path) -> PathBuf {
        let mut os = csv.as_os_str().to_owned();
        os.push(".meta");
        PathBuf::from(os)
    }

    pub fn write(&self, csv: &Path) -> std::io::Result<()> {
        std::fs::write(csv, self.to_csv())?;
        std::fs::write(Self::meta_path(csv), self.to_meta())
    }

    /// Rebuild a batch from CSV and sidecar text.
    pub fn parse(csv: &str, meta: &str) -> Result<Self> {
        let (gamma1, gamma2) = parse_batch_csv(csv)?;
        let (seed, count, link) = parse_batch_meta(meta)?;
        if gamma1.len() != count {
            return Err(Error::invalid("count", format!("sidecar says {count}, CSV has {} rows", gamma1.len())));
        }
        Ok(SampleBatch {
            seed,
            count,
            gamma1,
            gamma2,
            meta: link,
        })
    }

    pub fn read(csv: &Path) -> std::io::Result<Result<Self>> {
        let body = std::fs::read_to_string(csv)?;
        let meta = std::fs::read_to_string(Self::meta_path(csv))?;
        Ok(Self::parse(&body, &meta))
    }
}

/// Parse `gamma1,gamma2` rows. Entries must be finite and non-negative.
pub fn parse_batch_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("gamma1,gamma2") => {}
        other => return Err(Error::invalid("csv", format!("expected header gamma1,gamma2, got {other:?}"))),
    }
    let mut g1 = Vec::new();
    let mut g2 = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::invalid("csv", format!("row {}: expected two fields", i + 1)))?;
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::invalid("csv", format!("row {}: not a number: {s:?}", i + 1)))?;
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid("csv", format!("row {}: value {v} not finite and non-negative", i + 1)));
            }
            Ok(v)
        };
        g1.push(parse(a)?);
        g2.push(parse(b)?);
    }
    Ok((g1, g2))
}

/// Parse the key=value sidecar into (seed, count, link).
pub fn parse_batch_meta(text: &str) -> Result<(u64, usize, CorrelatedLink)> {
    let mut map = std::collections::HashMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid("meta", format!("expected key=value, got {line:?}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    fn get<T: std::str::FromStr>(map: &std::collections::HashMap<String, String>, key: &'static str) -> Result<T> {
        map.get(key)
            .ok_or_else(|| Error::invalid(key, "missing from sidecar"))?
            .parse()
            .map_err(|_| Error::invalid(key, "not parseable"))
    }
    let los = if map.contains_key("omega1") {
        LosSpec::Omega1(get(&map, "omega1")?)
    } else {
        LosSpec::Components {
            omega_prime: get(&map, "omega_prime")?,
            phi_a: get(&map, "phi_a")?,
            phi_b: get(&map, "phi_b")?,
        }
    };
    let params = MalagaParams::new(
        get(&map, "alpha")?,
        get(&map, "beta")?,
        get(&map, "b0")?,
        get(&map, "delta")?,
        get(&map, "omega")?,
        los,
    )?;
    let link = CorrelatedLink::new(params, get(&map, "mu1")?, get(&map, "mu2")?, get(&map, "rho")?)?;
    Ok((get(&map, "seed")?, get(&map, "count")?, link))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Preset;

    fn link(rho: f64) -> CorrelatedLink {
        CorrelatedLink::new(Preset::Strong.params(), 10.0, 10.0, rho).unwrap()
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let a = sample_pair(&link(0.5), 150_000, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_pair(&link(0.5), 150_000, 11).unwrap());
        assert_eq!(a, b);
        let c = sample_pair(&link(0.5), 150_000, 12).unwrap();
        assert_ne!(a.gamma1, c.gamma1);
    }

    #[test]
    fn irradiance_second_moment_matches_samples() {
        // E{γ} = μ by construction; check via a direct mean
        let b = sample_pair(&link(0.3), 400_000, 3).unwrap();
        let m: f64 = b.gamma1.iter().sum::<f64>() / b.count as f64;
        let var: f64 = b.gamma1.iter().map(|g| (g - m).powi(2)).sum::<f64>() / b.count as f64;
        let se = (var / b.count as f64).sqrt();
        assert!((m - 10.0).abs() < 4.0 * se, "mean {m}, se {se}");
    }

    #[test]
    fn round_trip_text() {
        let b = sample_pair(&link(0.2), 100, 5).unwrap();
        let back = SampleBatch::parse(&b.to_csv(), &b.to_meta()).unwrap();
        assert_eq!(b, back);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(parse_batch_csv("a,b\n1,2\n").is_err());
        assert!(parse_batch_csv("gamma1,gamma2\n1\n").is_err());
        assert!(parse_batch_csv("gamma1,gamma2\n1,-2\n").is_err());
        assert!(parse_batch_csv("gamma1,gamma2\nNaN,2\n").is_err());
        assert!(parse_batch_meta("seed=1\n").is_err());
    }

    #[test]
    fn zero_count_rejected() {
        assert!(sample_pair(&link(0.2), 0, 1).is_err());
    }
}
