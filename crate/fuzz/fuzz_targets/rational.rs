#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = gcx::q::parse(s) {
            assert_eq!(gcx::q::parse(&gcx::q::fmt(&x)).expect("reparse"), x);
        }
    }
});
