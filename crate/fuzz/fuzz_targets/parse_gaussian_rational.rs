#![no_main]

use hcf_core::expansion::hcf_expand_rational;
use hcf_core::GaussianRational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 256 {
        return;
    }
    if let Ok(z) = s.parse::<GaussianRational>() {
        assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
        let _ = hcf_expand_rational(&z);
    }
});
