#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = gcx::integrals::HalfPlaneGraph::decode(s) {
            assert_eq!(gcx::integrals::HalfPlaneGraph::decode(&g.encode()).expect("re-decode").encode(), g.encode());
        }
    }
});
