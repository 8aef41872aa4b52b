use fso_secrecy::channel::{CorrelatedLink, Preset};
use fso_secrecy::secrecy::{clamp_probability, pnzsc_exact, pnzsc_kernel, secrecy_rate, sop_exact, SecrecyTarget, CLAMP_SLACK};
use fso_secrecy::specfun::meijer::DEFAULT_EPSILON_SHIFT;
use fso_secrecy::specfun::{bessel_k, meijer_g, MeijerParams};
use fso_secrecy::SeriesNumerics;
use proptest::prelude::*;

fn preset() -> impl Strategy<Value = Preset> {
    prop_oneof![Just(Preset::Strong), Just(Preset::Moderate), Just(Preset::Weak)]
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn sop(l: &CorrelatedLink, rs: f64) -> f64 {
    sop_exact(l, &SecrecyTarget::new(rs).unwrap(), &SeriesNumerics::default()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn sop_is_a_probability_falling_in_mu1(
        p in preset(), mu1_db in 0.0..25.0f64, step in 2.0..10.0f64, mu2_db in 0.0..10.0f64,
        rho in 0.0..0.8f64, rs in 0.0..1.0f64,
    ) {
        let lo = CorrelatedLink::new(p.params(), db(mu1_db), db(mu2_db), rho).unwrap();
        let hi = lo.with_mu(db(mu1_db + step), db(mu2_db)).unwrap();
        let (a, b) = (sop(&lo, rs), sop(&hi, rs));
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(b <= a + 1e-9, "{a} -> {b}");
    }

    #[test]
    fn sop_rises_with_target_rate(
        p in preset(), mu1_db in 0.0..20.0f64, mu2_db in 0.0..10.0f64, rho in 0.0..0.8f64,
        rs in 0.0..1.0f64, extra in 0.1..1.0f64,
    ) {
        let l = CorrelatedLink::new(p.params(), db(mu1_db), db(mu2_db), rho).unwrap();
        prop_assert!(sop(&l, rs) <= sop(&l, rs + extra) + 1e-9);
    }

    #[test]
    fn pnzsc_complements_zero_rate_sop(
        p in preset(), mu1_db in 0.0..20.0f64, mu2_db in 0.0..20.0f64, rho in 0.0..0.8f64,
    ) {
        let l = CorrelatedLink::new(p.params(), db(mu1_db), db(mu2_db), rho).unwrap();
        let pn = pnzsc_exact(&l, &SeriesNumerics::default()).unwrap().value;
        prop_assert!((pn - (1.0 - sop(&l, 0.0))).abs() < 1e-8);
    }

    #[test]
    fn swapping_links_complements_pnzsc(
        p in preset(), mu1_db in 0.0..20.0f64, mu2_db in 0.0..20.0f64, rho in 0.0..0.8f64,
    ) {
        let l = CorrelatedLink::new(p.params(), db(mu1_db), db(mu2_db), rho).unwrap();
        let num = SeriesNumerics::default();
        let a = pnzsc_exact(&l, &num).unwrap().value;
        let b = pnzsc_exact(&l.swapped(), &num).unwrap().value;
        prop_assert!((a + b - 1.0).abs() < 1e-6, "{a} + {b}");
    }

    #[test]
    fn evaluation_is_pure(p in preset(), mu1_db in 0.0..20.0f64, rho in 0.0..0.9f64, rs in 0.0..1.0f64) {
        let l = CorrelatedLink::new(p.params(), db(mu1_db), db(3.0), rho).unwrap();
        prop_assert_eq!(sop(&l, rs).to_bits(), sop(&l, rs).to_bits());
    }
}

#[test]
fn pnzsc_near_one_at_high_snr_gap() {
    let l = CorrelatedLink::new(Preset::Moderate.params(), db(60.0), db(0.0), 0.5).unwrap();
    let p = pnzsc_exact(&l, &SeriesNumerics::default()).unwrap().value;
    assert!(p > 0.999, "{p}");
    let mc = fso_secrecy::oracle::pnzsc_mc(&l, 1_000_000, 42).unwrap();
    assert!(mc.covers(p, 3.0), "{p} vs {mc:?}");
}

proptest! {
    #[test]
    fn clamp_keeps_probabilities(x in 0.0..=1.0f64, eps in 0.0..CLAMP_SLACK) {
        prop_assert_eq!(clamp_probability(x).unwrap(), x);
        prop_assert_eq!(clamp_probability(1.0 + eps).unwrap(), 1.0);
        prop_assert_eq!(clamp_probability(-eps).unwrap(), 0.0);
    }

    #[test]
    fn clamp_rejects_excursions(x in 1e-6..10.0f64) {
        prop_assert!(clamp_probability(1.0 + x).is_err());
        prop_assert!(clamp_probability(-x).is_err());
        prop_assert!(clamp_probability(f64::NAN).is_err());
    }

    #[test]
    fn secrecy_rate_is_nonnegative(g1 in 0.0..1e6f64, g2 in 0.0..1e6f64) {
        let c = secrecy_rate(g1, g2);
        prop_assert!(c >= 0.0);
        prop_assert_eq!(c == 0.0, g1 <= g2);
    }

    #[test]
    fn kernel_reciprocity(a in 1.0..20.0f64, k1 in 1usize..5, k2 in 1usize..5, ln_r in -3.0..3.0f64) {
        // P(W1 < r W2) + P(W2 < W1 / r) = 1
        let r = ln_r.exp();
        let p = pnzsc_kernel(a, k1, k2, r, DEFAULT_EPSILON_SHIFT).unwrap();
        let q = pnzsc_kernel(a, k2, k1, 1.0 / r, DEFAULT_EPSILON_SHIFT).unwrap();
        prop_assert!((p + q - 1.0).abs() < 2e-8, "{p} + {q}");
    }

    #[test]
    fn meijer_bessel_reduction(b1 in 0.0..3.0f64, nu in 0.05..2.0f64, x in 0.01..20.0f64) {
        let b2 = b1 - nu;
        let g = meijer_g(&MeijerParams::new(2, 0, &[], &[b1, b2]).unwrap(), x).unwrap();
        let k = 2.0 * x.powf(0.5 * (b1 + b2)) * bessel_k(nu, 2.0 * x.sqrt()).unwrap();
        prop_assert!((g - k).abs() <= 1e-8 * k.abs(), "{g} vs {k}");
    }
}
