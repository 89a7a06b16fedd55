#![no_main]
use libfuzzer_sys::fuzz_target;

use hotkv::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut cfg = RunConfig::default();
    if cfg.apply_file(text).is_ok() {
        // Whatever parsed may still fail validation, but never panic.
        let _ = cfg.validate();
        let _ = cfg.cost_model();
    }
});
