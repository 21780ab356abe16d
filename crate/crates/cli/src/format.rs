//! Number formatting and the JSON/CSV writers.
//!
//! Every float leaves the program as `%.17g`: 17 significant digits, trailing
//! zeros trimmed, scientific notation outside `1e-4 <= |x| < 1e17`. Non-finite
//! values become the strings `inf`, `-inf` and `nan`.

use std::io;

use clap::ValueEnum;
use serde::{Deserialize, Serialize, Serializer};

/// Bumped whenever a field is renamed or removed from any JSON document.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// C-style `%.17g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    let mut out = String::with_capacity(24);
    if x < 0.0 {
        out.push('-');
    }
    if !(-4..17).contains(&exp) {
        let d = digits.trim_end_matches('0');
        out.push_str(&d[..1]);
        if d.len() > 1 {
            out.push('.');
            out.push_str(&d[1..]);
        }
        out.push_str(&format!(
            "e{}{:02}",
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        ));
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        out.push_str(int);
        let frac = frac.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

/// A float that serializes as a JSON number when finite and as a string otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&fmt_num(self.0))
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num(v)
    }
}

/// Pretty-printing formatter that writes floats with [`fmt_num`].
struct G17(serde_json::ser::PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident $(, $arg:ident : $ty:ty)?);* $(;)?) => {$(
        fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
            serde_json::ser::Formatter::$name(&mut self.0, w $(, $arg)?)
        }
    )*};
}

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate! {
        begin_array;
        end_array;
        begin_array_value, first: bool;
        end_array_value;
        begin_object;
        end_object;
        begin_object_key, first: bool;
        begin_object_value;
        end_object_value;
    }
}

/// Serializes `value` as indented JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        G17(serde_json::ser::PrettyFormatter::with_indent(b"  ")),
    );
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    buf
}

/// A CSV table with a fixed header.
pub struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header).expect("in-memory CSV write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory CSV write");
        }
        w.into_inner().expect("in-memory CSV flush")
    }
}

/// CSV cell for an optional value; absent values are left empty.
pub fn cell(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c() {
        // reference strings from printf("%.17g")
        let cases = [
            (1.75, "1.75"),
            (0.1, "0.10000000000000001"),
            (1.0 / 12.0, "0.083333333333333329"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (1e-5, "1.0000000000000001e-05"),
            (1.5e300, "1.5000000000000001e+300"),
            (1e17, "1e+17"),
            (12345678901234567.0, "12345678901234568"),
            (0.0001, "0.0001"),
            (-2.5, "-2.5"),
            (100.0, "100"),
            (5e-324, "4.9406564584124654e-324"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_num(x), s, "{x:e}");
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(-0.0), "-0");
    }

    #[test]
    fn g17_round_trips() {
        for e in (-300..=300).step_by(7) {
            for m in [1.0, 1.0 / 3.0, 2.0f64.sqrt(), 9.999999999999998, 0.1 + 0.2] {
                let x = m * 10f64.powi(e);
                assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
                assert_eq!(fmt_num(-x).parse::<f64>().unwrap(), -x);
            }
        }
    }

    #[test]
    fn json_uses_g17_and_string_infinity() {
        #[derive(Serialize)]
        struct Doc {
            a: Num,
            b: Num,
            c: Option<Num>,
            n: i64,
        }
        let json = String::from_utf8(to_json(&Doc {
            a: Num(0.1),
            b: Num(f64::INFINITY),
            c: None,
            n: -3,
        }))
        .unwrap();
        assert_eq!(
            json,
            "{\n  \"a\": 0.10000000000000001,\n  \"b\": \"inf\",\n  \"c\": null,\n  \"n\": -3\n}\n"
        );
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_quotes_and_headers() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        t.push(vec![cell(None), cell(Some(2.0))]);
        assert_eq!(
            String::from_utf8(t.to_bytes()).unwrap(),
            "a,b\n1,\"x,y\"\n,2\n"
        );
    }
}
