#![no_main]

use gaborbench::FrameSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = FrameSet::from_json(text) {
        // accepted sets must survive a round trip unchanged
        let again = FrameSet::from_json(&set.to_json()).expect("round trip");
        assert_eq!(set, again);
        assert!(set.cardinality() <= set.dim() * set.dim());
    }
});
