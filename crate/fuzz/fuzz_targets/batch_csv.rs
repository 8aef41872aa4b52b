#![no_main]

use fso_secrecy::channel::parse_batch_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((g1, g2)) = parse_batch_csv(text) {
            assert_eq!(g1.len(), g2.len());
            assert!(g1.iter().chain(&g2).all(|v| v.is_finite() && *v >= 0.0));
        }
    }
});
