#![no_main]
use gcx::polyrep::{GeneratorSpec, SuperPolynomial};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let spec = GeneratorSpec::uniform(2, 2, 0, 4).unwrap();
    if let Ok(p) = SuperPolynomial::parse(s, &spec) {
        let q = SuperPolynomial::parse(&p.to_text(), &spec).expect("reparse");
        assert_eq!(q.to_text(), p.to_text());
    }
});
