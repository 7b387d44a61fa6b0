#![no_main]

use cascade_core::cli::config::parse_params;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let _ = parse_params(&tokens);
    }
});
