//! Plain-text trace and result files.
//!
//! All files are UTF-8 with LF line endings. Lines starting with `#` are
//! headers or comments; a `# dt=<seconds>` header is required for traces, and
//! other `# key=value` headers are kept as attributes.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::bench::DetectorTraces;
use crate::correlate::{CorrelationKind, CorrelationResult};
use crate::linalg::C64;
use crate::source::FieldTrace;
use crate::{Error, Result};

pub const FIELD_COLUMNS: &str = "re,im";
pub const DETECTOR_COLUMNS: &str = "i3,i4";
pub const RESULT_COLUMNS: &str = "tau_s,kind,value,std_error,n_samples";

/// A parsed two-column trace file: its header attributes and numeric rows.
#[derive(Debug, Clone, PartialEq)]
struct RawTrace {
    dt: f64,
    attributes: BTreeMap<String, String>,
    rows: Vec<(f64, f64)>,
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("'{}' is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_error(
            line,
            format!("'{}' is not finite", field.trim()),
        ));
    }
    Ok(v)
}

fn read_two_columns<R: BufRead>(reader: R) -> Result<RawTrace> {
    let mut dt = None;
    let mut attributes = BTreeMap::new();
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if let Some((key, value)) = header.split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                if key == "dt" {
                    let v = parse_number(value, lineno)?;
                    if v <= 0.0 {
                        return Err(parse_error(lineno, "dt must be positive"));
                    }
                    dt = Some(v);
                } else {
                    attributes.insert(key.to_string(), value.to_string());
                }
            }
            continue;
        }
        if dt.is_none() {
            return Err(parse_error(
                lineno,
                "data row before the '# dt=<seconds>' header",
            ));
        }
        let mut fields = line.split(',');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_error(
                lineno,
                "expected exactly two comma-separated columns",
            ));
        };
        rows.push((parse_number(a, lineno)?, parse_number(b, lineno)?));
    }
    let dt = dt.ok_or_else(|| parse_error(0, "missing '# dt=<seconds>' header"))?;
    if rows.is_empty() {
        return Err(parse_error(0, "no data rows"));
    }
    Ok(RawTrace {
        dt,
        attributes,
        rows,
    })
}

pub fn write_field_trace<W: Write>(mut w: W, trace: &FieldTrace) -> Result<()> {
    writeln!(w, "# dt={}", trace.dt)?;
    writeln!(w, "# {FIELD_COLUMNS}")?;
    for z in &trace.samples {
        writeln!(w, "{},{}", z.re, z.im)?;
    }
    Ok(())
}

pub fn read_field_trace<R: BufRead>(reader: R) -> Result<FieldTrace> {
    let raw = read_two_columns(reader)?;
    let samples = raw
        .rows
        .into_iter()
        .map(|(re, im)| C64::new(re, im))
        .collect();
    FieldTrace::new(raw.dt, samples)
}

/// Detector traces together with any `# key=value` header attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorFile {
    pub traces: DetectorTraces,
    pub attributes: BTreeMap<String, String>,
}

pub fn write_detector_traces<W: Write>(
    mut w: W,
    traces: &DetectorTraces,
    attributes: &BTreeMap<String, String>,
) -> Result<()> {
    writeln!(w, "# dt={}", traces.dt)?;
    for (k, v) in attributes {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "# {DETECTOR_COLUMNS}")?;
    for (a, b) in traces.i3.iter().zip(&traces.i4) {
        writeln!(w, "{a},{b}")?;
    }
    Ok(())
}

pub fn read_detector_traces<R: BufRead>(reader: R) -> Result<DetectorFile> {
    let raw = read_two_columns(reader)?;
    for (idx, &(a, b)) in raw.rows.iter().enumerate() {
        if a < 0.0 || b < 0.0 {
            // Row numbers here count data rows, not file lines.
            return Err(Error::InvalidArgument(format!(
                "negative intensity in data row {}",
                idx + 1
            )));
        }
    }
    let (i3, i4) = raw.rows.into_iter().unzip();
    Ok(DetectorFile {
        traces: DetectorTraces::new(raw.dt, i3, i4)?,
        attributes: raw.attributes,
    })
}

pub fn write_results<W: Write>(
    mut w: W,
    results: &[(CorrelationKind, CorrelationResult)],
) -> Result<()> {
    writeln!(w, "# {RESULT_COLUMNS}")?;
    for (kind, r) in results {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.tau, kind, r.value, r.std_error, r.n_samples
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_detector_file_with_attributes() {
        let text = "# dt=1e-7\n# phi3=0\n# i3,i4\n0.5,0.25\n1,0\n";
        let f = read_detector_traces(text.as_bytes()).unwrap();
        assert_eq!(f.traces.dt, 1e-7);
        assert_eq!(f.traces.i3, vec![0.5, 1.0]);
        assert_eq!(f.traces.i4, vec![0.25, 0.0]);
        assert_eq!(f.attributes.get("phi3").map(String::as_str), Some("0"));
    }

    #[test]
    fn missing_dt_header() {
        let err = read_detector_traces("# i3,i4\n1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_detector_traces("# i3,i4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 0, .. }), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = read_detector_traces("# dt=1e-7\n1,1\n1;2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_detector_traces("# dt=1e-7\n1,1\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_detector_traces("# dt=1e-7\n1,1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_detector_traces("# dt=1e-7\nNaN,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_dt_and_negative_intensity() {
        assert!(read_detector_traces("# dt=0\n1,1\n".as_bytes()).is_err());
        assert!(read_detector_traces("# dt=-1\n1,1\n".as_bytes()).is_err());
        assert!(read_detector_traces("# dt=1\n-1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn field_trace_round_trip_is_exact() {
        let trace = FieldTrace::new(
            1e-7,
            vec![C64::new(0.1, -0.7), C64::new(1.0 / 3.0, 2.0f64.sqrt())],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_field_trace(&mut buf, &trace).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("# dt=0.0000001\n"));
        assert_eq!(read_field_trace(buf.as_slice()).unwrap(), trace);
    }

    #[test]
    fn results_have_header() {
        let r = CorrelationResult {
            value: 1.5,
            tau: 0.0,
            n_samples: 10,
            std_error: 0.01,
        };
        let mut buf = Vec::new();
        write_results(&mut buf, &[(CorrelationKind::Cross, r)]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# tau_s,kind,value,std_error,n_samples\n0,cross,1.5,0.01,10\n"
        );
    }
}
