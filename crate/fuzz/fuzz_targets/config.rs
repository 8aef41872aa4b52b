#![no_main]

use fso_secrecy_cli::{parse_config, render_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(map) = parse_config(text) {
            assert_eq!(parse_config(&render_config(&map)).ok(), Some(map));
        }
    }
});
