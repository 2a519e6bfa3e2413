#![no_main]
use libfuzzer_sys::fuzz_target;
use tumour_damage::config::{parse_config, serialize_config};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Anything that parses must survive a serialise/parse round trip.
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&serialize_config(&cfg)).expect("serialised config reparses");
        assert_eq!(serialize_config(&again), serialize_config(&cfg));
    }
});
