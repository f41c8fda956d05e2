#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        for d in [2, 3] {
            if let Ok(v) = gcx::graphcore::GraphVector::from_json(s, d) {
                let _ = gcx::graphcore::GraphVector::from_json(&v.to_json(), d).expect("roundtrip");
            }
        }
    }
});
