#![no_main]

use libfuzzer_sys::fuzz_target;
use xorlab_cli::records::TrialTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(t) = TrialTable::read(data) {
        let mut out = Vec::new();
        t.write(&mut out).expect("a parsed table writes back");
        assert_eq!(TrialTable::read(&out[..]).expect("re-read"), t);
    }
});
