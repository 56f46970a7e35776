#![no_main]

use hbt_core::io::{read_field_trace, write_field_trace};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(trace) = read_field_trace(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_field_trace(&mut buf, &trace).unwrap();
    let again = read_field_trace(buf.as_slice()).unwrap();
    assert_eq!(again.samples, trace.samples);
    assert_eq!(again.dt, trace.dt);
});
