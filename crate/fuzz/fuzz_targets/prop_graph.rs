#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = gcx::props::PropGraph::decode(s) {
            let _ = gcx::props::PropGraph::decode(&g.encode()).expect("re-decode");
        }
    }
});
