use fso_secrecy::channel::{CorrelatedLink, Preset};
use fso_secrecy::secrecy::{sop_exact, SecrecyTarget};
use fso_secrecy::SeriesNumerics;

fn sop_at(rho: f64) -> f64 {
    let l = CorrelatedLink::new(Preset::Strong.params(), 1e5, 10f64.powf(0.5), rho).unwrap();
    sop_exact(&l, &SecrecyTarget::new(0.1).unwrap(), &SeriesNumerics::default()).unwrap().value
}

#[test]
fn near_full_correlation_lowers_outage() {
    assert!(sop_at(0.98) < sop_at(0.7));
}

// The expected rise from rho = 0.4 to 0.7 does not occur with these presets:
// SOP(rho) decreases over the whole grid. Kept as a record; run with --ignored.
#[test]
#[ignore = "not reproduced: SOP decreases in rho for the shipped presets"]
fn moderate_correlation_raises_outage() {
    let (lo, hi) = (sop_at(0.4), sop_at(0.7));
    assert!(hi > lo, "SOP(0.4) = {lo:e}, SOP(0.7) = {hi:e}");
}
