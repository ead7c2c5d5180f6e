#![no_main]

use hcf_core::search::{parse_decimal, PsiSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = parse_decimal(s);
    if let Ok(p) = s.parse::<PsiSpec>() {
        assert_eq!(p.to_string().parse::<PsiSpec>().unwrap(), p);
    }
});
