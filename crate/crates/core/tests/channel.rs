use fso_secrecy::channel::{
    derive_constants, joint_pdf, marginal_pdf, sample_large_scale, sample_pair, unit_mean_omega, CorrelatedLink,
    LosSpec, MalagaParams, Preset, SampleBatch,
};
use fso_secrecy::specfun::adaptive::{integrate_panels, integrate_to_infinity, Tolerance};
use fso_secrecy::SeriesNumerics;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[test]
fn constants_match_hand_formulas() {
    let (b0, delta, omega_prime, pa, pb) = (0.3f64, 0.6, 1.5, 0.4f64, 1.1);
    let omega1 = omega_prime + 2.0 * b0 * delta + 2.0 * (2.0 * b0 * delta * omega_prime).sqrt() * (pa - pb).cos();
    let omega = unit_mean_omega(b0, delta, omega1);
    let p = MalagaParams::new(
        3.0,
        5,
        b0,
        delta,
        omega,
        LosSpec::Components {
            omega_prime,
            phi_a: pa,
            phi_b: pb,
        },
    )
    .unwrap();
    let c = derive_constants(&p);
    let xi = 2.0 * b0 * (1.0 - delta);
    assert!((c.xi - xi).abs() < 1e-15);
    assert!((c.omega1 - omega1).abs() < 1e-14);
    assert!((c.c_factor - 5.0 / (omega * (5.0 * xi + omega1))).abs() < 1e-13);
    assert!(!c.degenerate);
    // E{K(K+1)} by direct summation over the binomial mixture
    let q = omega1 / (xi * 5.0 + omega1);
    let mut m2 = 0.0;
    for k in 1..=5u32 {
        let j = (k - 1) as i32;
        let binom = [1.0, 4.0, 6.0, 4.0, 1.0][j as usize];
        m2 += binom * q.powi(j) * (1.0 - q).powi(4 - j) * (k * (k + 1)) as f64;
    }
    assert!((c.kappa - (3.0 * 4.0 * m2).sqrt()).abs() < 1e-12);
}

#[test]
fn weights_sum_to_one() {
    for preset in [Preset::Strong, Preset::Moderate, Preset::Weak] {
        let s: f64 = preset.params().ln_mixture_weights().iter().map(|w| w.exp()).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }
}

#[test]
fn large_scale_correlation_is_rho_squared() {
    let link = CorrelatedLink::new(Preset::Moderate.params(), 10.0, 10.0, 0.5).unwrap();
    let (x, y) = sample_large_scale(&link, 400_000, 9).unwrap();
    let r = pearson(&x, &y);
    assert!((r - 0.25).abs() < 0.01, "{r}");
}

#[test]
fn uncorrelated_pair_is_uncorrelated() {
    let link = CorrelatedLink::new(Preset::Strong.params(), 10.0, 10.0, 0.0).unwrap();
    let b = sample_pair(&link, 1_000_000, 21).unwrap();
    let r = pearson(&b.gamma1, &b.gamma2);
    assert!(r.abs() < 0.005, "{r}");
}

#[test]
fn sample_mean_is_mu() {
    // standardized mean errors over independent seeds should look N(0, 1)
    let link = CorrelatedLink::new(Preset::Weak.params(), 7.0, 2.0, 0.8).unwrap();
    let mut z = Vec::new();
    for seed in 0..10 {
        let b = sample_pair(&link, 200_000, seed).unwrap();
        for (g, mu) in [(&b.gamma1, 7.0), (&b.gamma2, 2.0)] {
            let n = g.len() as f64;
            let mean = g.iter().sum::<f64>() / n;
            let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            z.push((mean - mu) / (var / n).sqrt());
        }
    }
    let n = z.len() as f64;
    let mz = z.iter().sum::<f64>() / n;
    let sd = (z.iter().map(|x| (x - mz).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mz.abs() < 3.0 / n.sqrt(), "{z:?}");
    assert!((0.5..1.6).contains(&sd), "{z:?}");
}

#[test]
fn sample_stream_depends_only_on_seed() {
    let link = CorrelatedLink::new(Preset::Weak.params(), 3.0, 2.0, 0.6).unwrap();
    let a = sample_pair(&link, 70_000, 5).unwrap();
    assert_eq!(a, sample_pair(&link, 70_000, 5).unwrap());
    assert_ne!(a.gamma1, sample_pair(&link, 70_000, 6).unwrap().gamma1);
    let prefix = sample_pair(&link, 100, 5).unwrap();
    assert_eq!(prefix.gamma1[..], a.gamma1[..100]);
}

#[test]
fn batch_text_round_trip() {
    let link = CorrelatedLink::new(Preset::Strong.params(), 4.0, 1.0, 0.3).unwrap();
    let b = sample_pair(&link, 500, 1).unwrap();
    let back = SampleBatch::parse(&b.to_csv(), &b.to_meta()).unwrap();
    assert_eq!(back, b);
}

#[test]
fn marginal_sample_histogram() {
    let mu = 10.0;
    let link = CorrelatedLink::new(Preset::Strong.params(), mu, mu, 0.4).unwrap();
    let n = 200_000;
    let b = sample_pair(&link, n, 77).unwrap();
    let num = SeriesNumerics::default();
    let edges = [0.0, 0.05, 0.2, 0.5, 1.0, 1.8, 3.0, 5.0].map(|e| e * mu);
    let mut probs: Vec<f64> = edges
        .windows(2)
        .map(|w| {
            let pdf = |g: f64| if g > 0.0 { marginal_pdf(link.params(), mu, g, &num).unwrap() } else { 0.0 };
            let mid = [w[0], 0.5 * (w[0] + w[1]), w[1]];
            integrate_panels(pdf, &mid, Tolerance::new(1e-12, 1e-10)).unwrap().value
        })
        .collect();
    probs.push(1.0 - probs.iter().sum::<f64>());
    let mut counts = vec![0usize; probs.len()];
    for &g in &b.gamma1 {
        let bin = edges.iter().rposition(|&e| g >= e).unwrap();
        counts[bin] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let p_value = 1.0 - ChiSquared::new((probs.len() - 1) as f64).unwrap().cdf(stat);
    assert!(p_value > 0.001, "chi2 {stat}, p {p_value}, {counts:?}");
}

#[test]
fn joint_density_integrates_to_marginal() {
    let num = SeriesNumerics::default();
    let link = CorrelatedLink::new(Preset::Strong.params(), 10.0, 5.0, 0.5).unwrap();
    for &g1 in &[0.5, 4.0, 20.0] {
        let f = |g2: f64| if g2 > 0.0 { joint_pdf(&link, g1, g2, &num).unwrap() } else { 0.0 };
        let tol = Tolerance::new(1e-12, 1e-8);
        let near = integrate_panels(|v: f64| 2.0 * v * f(v * v), &[0.0, 0.01, 0.1, 1.0, 3.0], tol).unwrap();
        let far = integrate_to_infinity(f, 9.0, tol).unwrap();
        let m = marginal_pdf(link.params(), 10.0, g1, &num).unwrap();
        let got = near.value + far.value;
        assert!((got - m).abs() < 1e-5 * m, "g1={g1}: {got} vs {m}");
    }
}

#[test]
fn degenerate_and_invalid_inputs() {
    let p = Preset::Strong.params();
    assert!(CorrelatedLink::new(p, 1.0, 1.0, 1.0).is_err());
    assert!(CorrelatedLink::new(p, 1.0, 0.0, 0.2).is_err());
    assert!(MalagaParams::new(1.0, 0, 0.4, 0.5, 1.0, LosSpec::Omega1(1.0)).is_err());
    let num = SeriesNumerics::default();
    let link = CorrelatedLink::new(p, 1.0, 1.0, 0.2).unwrap();
    assert!(joint_pdf(&link, -1.0, 1.0, &num).map(|v| v == 0.0).unwrap_or(true));
}
