#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(store) = hotkv::store::read_store(data) {
        let mut bytes = Vec::new();
        hotkv::store::write_store(&mut bytes, store.layout, &store.chunks).unwrap();
        assert_eq!(bytes, data);
        // Decoding a parsed store may report corrupt payloads but never panic.
        for chunk in &store.chunks {
            let _ = hotkv::decompress(chunk);
        }
    }
});
