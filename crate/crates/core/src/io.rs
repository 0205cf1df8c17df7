//! JSON input formats and deterministic JSON output.
//!
//! Matrix files: `{"n": 2, "entries": [[[re, im], ...], ...]}` (row-major).
//! Weight files: `{"c": [1.0, 0.0]}`.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::support::WeightVector;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.entries.len() != file.n {
        return Err(Error::NotSquare {
            rows: file.entries.len(),
            row: file.entries.len().min(file.n),
            len: file.n,
        });
    }
    let rows: Vec<Vec<Complex64>> = file
        .entries
        .iter()
        .map(|r| r.iter().map(|p| Complex64::new(p[0], p[1])).collect())
        .collect();
    ComplexMatrix::from_rows(rows)
}

pub fn parse_weights(text: &str) -> Result<WeightVector> {
    serde_json::from_str(text).map_err(parse_error)
}

pub fn matrix_to_json(a: &ComplexMatrix) -> String {
    let file = MatrixFile {
        n: a.dim(),
        entries: a
            .rows()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    to_json(&file)
}

pub fn weights_to_json(c: &WeightVector) -> String {
    to_json(c)
}

/// Compact JSON whose floats always carry 17 significant digits, so equal inputs give
/// byte-identical output and every value round-trips.
pub struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_f64(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{}", format_f64(value as f64))
    }
}

/// `{:.16e}` rendering used for every number written by this crate.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value
        .serialize(&mut ser)
        .expect("serialization into memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Serde helpers writing complex numbers as `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
