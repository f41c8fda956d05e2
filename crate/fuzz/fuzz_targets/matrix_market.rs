#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = gcx::linalg::SparseMatrix::from_matrix_market(s) {
            let _ = gcx::linalg::SparseMatrix::from_matrix_market(&m.to_matrix_market()).expect("reparse");
        }
    }
});
