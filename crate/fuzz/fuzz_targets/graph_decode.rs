#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((d, g)) = gcx::graphcore::decode(s) {
            // decode . encode is the identity on accepted input
            let again = gcx::graphcore::decode(&g.encode(d)).expect("re-decode");
            assert_eq!(again.1.encode(again.0), g.encode(d));
        }
    }
});
