//! Compact JSON with every float written to 17 significant digits, so a
//! parse/re-serialise cycle reproduces the bytes exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

pub struct SigFigs;

impl Formatter for SigFigs {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// `{:.16e}`, which always carries an exponent and so reads back as a float.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigs);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::{json, Value};

    #[test]
    fn floats_carry_seventeen_digits() {
        let s = to_string(&json!({"x": 0.1, "n": 3, "one": 1.0})).unwrap();
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"n":3,"one":1.0000000000000000e0}"#);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let v = json!({"b": [std::f64::consts::PI, -2.5e-300, 7e22], "a": null, "t": true});
        let first = to_string(&v).unwrap();
        let parsed: Value = serde_json::from_str(&first).unwrap();
        assert_eq!(to_string(&parsed).unwrap(), first);
        let back: f64 = parsed["b"][0].as_f64().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    proptest::proptest! {
        #[test]
        fn any_finite_float_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let first = to_string(&json!({"v": x})).unwrap();
            let parsed: Value = serde_json::from_str(&first).unwrap();
            proptest::prop_assert_eq!(parsed["v"].as_f64().unwrap(), x);
            proptest::prop_assert_eq!(to_string(&parsed).unwrap(), first);
        }
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_string(&json!({"x": f64::NAN})).unwrap(), r#"{"x":null}"#);
        assert_eq!(to_string(&[f64::INFINITY]).unwrap(), "[null]");
    }
}
