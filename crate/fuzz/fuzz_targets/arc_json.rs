#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(arc) = heis_geo::parse_arc_json(s) {
            // anything that passed validation must evaluate without panicking
            let end = arc.param_end();
            let _ = arc.eval(0.0);
            let _ = arc.eval(0.5 * end);
            let _ = arc.eval(end);
            let _ = arc.length();
            let js = serde_json::to_string(&arc).unwrap();
            let back = heis_geo::parse_arc_json(&js).unwrap();
            assert_eq!(arc, back);
        }
    }
});
