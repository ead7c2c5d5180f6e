#![no_main]

use hcf_core::GaussianInt;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(a) = s.parse::<GaussianInt>() {
        assert_eq!(a.to_string().parse::<GaussianInt>().unwrap(), a);
    }
});
