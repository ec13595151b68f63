#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The CLI point parser must never panic, whatever the flag value was.
    if let Ok(s) = std::str::from_utf8(data) {
        let hint = data.first().map(|b| (*b as usize) % 4);
        if let Ok(p) = heis_geo::parse_point(s, hint) {
            // accepted points satisfy the invariants, so the group ops hold
            let _ = p.group_mul(&p.inverse());
        }
    }
});
