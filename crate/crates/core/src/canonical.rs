//! Canonical JSON: object keys sorted, reals written with exactly six
//! decimals, compact layout, trailing newline.
//!
//! Every document the CLI writes goes through [`to_string`], so two runs over
//! the same inputs produce byte-identical files.

use serde::Serialize;
use serde_json::ser::Formatter;
use std::io;

struct FixedDecimals;

impl Formatter for FixedDecimals {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.6}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.6}")
    }
}

/// Serialize `value` canonically.
///
/// The value is first converted to a [`serde_json::Value`], whose object map
/// is ordered by key, then written with fixed six-decimal reals. Non-finite
/// reals become `null` (serde_json's conversion rule).
pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let tree = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDecimals);
    tree.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}
