//! Input is the three snapshot files joined by form feeds:
//! `cells \x0c nodes \x0c meta`.
#![no_main]
use libfuzzer_sys::fuzz_target;
use tumour_damage::snapshot::parse_snapshot;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut parts = text.splitn(3, '\x0c');
    let (Some(c), Some(n), Some(m)) = (parts.next(), parts.next(), parts.next()) else {
        return;
    };
    let _ = parse_snapshot(c, n, m);
});
