#![no_main]

use cascade_core::gates::PhaseGate;
use cascade_core::levels::CascadeParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut parts = text.splitn(2, '\n');
        let name = parts.next().unwrap_or("");
        let rest = parts.next().unwrap_or("");
        let get = |key: &str| {
            rest.lines().find_map(|l| {
                let (k, v) = l.split_once('=')?;
                if k.trim() == key {
                    v.trim().parse().ok()
                } else {
                    None
                }
            })
        };
        let params = CascadeParams::new(10.0, 0.0, 2.0).unwrap();
        let _ = PhaseGate::from_name(name, &params, get);
    }
});
