#![no_main]

use libfuzzer_sys::fuzz_target;
use xorlab_cli::plot::render;
use xorlab_cli::records::parse_table;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = parse_table(data) {
        if let Ok(svg) = render(&table, None) {
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        }
    }
});
