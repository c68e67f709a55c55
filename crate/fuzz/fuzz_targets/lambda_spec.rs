#![no_main]

use gaborbench::parse::LambdaSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = text.parse::<LambdaSpec>() else { return };
    if matches!(spec, LambdaSpec::File(_)) {
        return;
    }
    for m in [1, 2, 7, 16] {
        if let Ok(set) = spec.build(m, Some(0)) {
            assert!(set.points().iter().all(|&(k, l)| k < m && l < m));
        }
    }
});
