#![no_main]

use libfuzzer_sys::fuzz_target;
use xorlab_cli::records::parse_table;

fuzz_target!(|data: &[u8]| {
    let _ = parse_table(data);
});
