//! Fixed float formatting for reports: every float is written with 17
//! significant digits so identical inputs give byte-identical files.

use num_complex::Complex64;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serializer;
use serde_json::value::RawValue;

/// `x` with 17 significant digits; non-finite values become `null`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(sig17(x)).expect("valid JSON number")
}

pub fn f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&raw(*x))
}

pub fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(2))?;
    m.serialize_entry("re", &raw(z.re))?;
    m.serialize_entry("im", &raw(z.im))?;
    m.end()
}

struct C<'a>(&'a Complex64);

impl serde::Serialize for C<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        complex(self.0, s)
    }
}

pub fn opt_complex<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    match z {
        Some(z) => complex(z, s),
        None => s.serialize_none(),
    }
}

pub fn complex_vec<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&C(z))?;
    }
    seq.end()
}

pub fn opt_complex_vec<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => complex_vec(v, s),
        None => s.serialize_none(),
    }
}

/// Row-major list of rows.
pub fn complex_matrix<S: Serializer>(m: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
    struct Row<'a>(&'a [Complex64]);
    impl serde::Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            complex_vec(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for r in m {
        seq.serialize_element(&Row(r))?;
    }
    seq.end()
}
