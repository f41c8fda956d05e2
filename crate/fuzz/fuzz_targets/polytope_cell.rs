#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = gcx::polytopes::decode_cell(s);
        let _ = gcx::polytopes::PlanarTree::decode(s);
    }
});
