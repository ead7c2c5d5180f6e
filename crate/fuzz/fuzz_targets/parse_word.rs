#![no_main]

use hcf_core::word::{evaluate, qpair, Word};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 256 {
        return;
    }
    if let Ok(w) = s.parse::<Word>() {
        assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
        assert!(qpair(&w).determinant().is_unit());
        let _ = evaluate(&w);
    }
});
