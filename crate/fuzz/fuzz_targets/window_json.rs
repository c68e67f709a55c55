#![no_main]

use gaborbench::Window;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = Window::from_json(text) {
        assert!(w.values().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        let again = Window::from_json(&w.to_json()).expect("round trip");
        assert_eq!(w.dim(), again.dim());
        // the default float parser may differ from the input by one ulp
        for (a, b) in w.values().iter().zip(again.values()) {
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }
});
