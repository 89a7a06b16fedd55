#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(profile) = hotkv::store::read_profile_csv(text) {
        let mut bytes = Vec::new();
        hotkv::store::write_profile_csv(&mut bytes, &profile).unwrap();
        // Writing sorts rows by id; the rewrite must parse back to the same
        // profile even when the input order differed.
        let rewritten = String::from_utf8(bytes).unwrap();
        assert_eq!(hotkv::store::read_profile_csv(&rewritten).unwrap(), profile);
    }
});
