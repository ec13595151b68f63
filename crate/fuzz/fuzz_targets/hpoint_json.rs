#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = heis_geo::parse_hpoint_json(s) {
            // parse -> serialize -> parse must be stable and panic-free
            let js = serde_json::to_string(&p).unwrap();
            let back = heis_geo::parse_hpoint_json(&js).unwrap();
            assert_eq!(p, back);
        }
    }
});
