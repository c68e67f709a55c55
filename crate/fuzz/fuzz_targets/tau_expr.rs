#![no_main]

use gaborbench::parse::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(expr) = text.parse::<Expr>() {
        for m in [1.0, 64.0, 1e6] {
            let _ = expr.eval(m);
        }
        assert_eq!(expr.as_str(), text.trim());
    }
});
