#![no_main]

use libfuzzer_sys::fuzz_target;
use xorlab_cli::manifest::RunManifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = RunManifest::from_json(data) {
        let json = m.to_json().expect("serializes");
        assert_eq!(
            RunManifest::from_json(json.as_bytes()).expect("round-trips"),
            m
        );
    }
});
