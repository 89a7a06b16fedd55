#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(chunks) = hotkv::store::read_corpus(data) {
        // Anything that parses must re-serialize to a byte-identical file.
        let mut bytes = Vec::new();
        hotkv::store::write_corpus(&mut bytes, &chunks).unwrap();
        assert_eq!(bytes, data);
    }
});
