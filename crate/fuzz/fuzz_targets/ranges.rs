#![no_main]

use gaborbench::parse::{parse_list, parse_range};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_range(text) {
        assert!(!values.is_empty());
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }
    let _ = parse_list::<f64>(text);
    let _ = parse_list::<usize>(text);
});
