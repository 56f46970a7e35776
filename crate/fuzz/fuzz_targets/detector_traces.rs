#![no_main]

use hbt_core::correlate::{g2, CorrelationKind};
use hbt_core::io::{read_detector_traces, write_detector_traces};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(file) = read_detector_traces(data) else {
        return;
    };
    let t = &file.traces;
    assert_eq!(t.i3.len(), t.i4.len());
    assert!(t.dt > 0.0);

    // Accepted input must survive a write/read cycle unchanged.
    let mut buf = Vec::new();
    write_detector_traces(&mut buf, t, &file.attributes).unwrap();
    let again = read_detector_traces(buf.as_slice()).unwrap();
    assert_eq!(again.traces.i3, t.i3);
    assert_eq!(again.traces.i4, t.i4);

    for kind in CorrelationKind::ALL {
        if let Ok(r) = g2(t, kind, 0.0) {
            assert!(r.std_error >= 0.0 || r.std_error.is_nan());
        }
    }
});
