//! Deterministic serialization helpers for reports.
//!
//! JSON output prints every real with 17 significant digits, which
//! round-trips binary64 losslessly and keeps repeated runs byte-identical.
//! Human output uses 6 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// serde_json formatter that writes all f64 values as `{:.16e}`
/// (17 significant digits). Everything else keeps the compact defaults.
#[derive(Default)]
pub struct FullPrecisionFormatter;

impl Formatter for FullPrecisionFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.8e}")
    }
}

/// Serialize a report value to a JSON string with full-precision reals.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecisionFormatter);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

/// Format a real with 6 significant digits for human-readable output.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..=9).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}
