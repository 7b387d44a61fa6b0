#![no_main]

use cascade_core::gates::PhaseTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(t) = PhaseTable::parse(text) {
            // interpolation must stay finite inside and outside the nodes
            for k in [-1e6, -1.0, 0.0, 0.5, 1e6] {
                assert!(t.eval(k).is_finite());
            }
        }
    }
});
