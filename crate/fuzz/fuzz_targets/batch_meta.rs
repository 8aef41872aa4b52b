#![no_main]

use fso_secrecy::channel::parse_batch_meta;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((_, _, link)) = parse_batch_meta(text) {
            assert!((0.0..1.0).contains(&link.rho()));
            assert!(link.mu1() > 0.0 && link.mu2() > 0.0);
        }
    }
});
