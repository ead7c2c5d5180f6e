#![no_main]

use hcf_core::geometry::{Region, RegionRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = serde_json::from_slice::<RegionRecord>(data) else {
        return;
    };
    if let Ok(r) = Region::from_record(&rec) {
        let _ = r.to_string();
        let _ = Region::from_record(&r.record());
    }
});
