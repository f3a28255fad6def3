//! JSON channel and operator files, and the float formatting shared by every
//! JSON artifact the tool writes.
//!
//! Complex entries are `[re, im]` pairs, matrices are arrays of rows, and
//! floats are written with 17 significant digits so that they round-trip.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::linops::{CMatrix, LinearMap, Operator, C64};
use crate::posmap::{MapDescriptor, Provenance};
use crate::MAX_DIM;

/// A matrix entry: `[re, im]`, or a bare real number on input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> C64 {
        match e {
            Entry::Complex([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

/// Row-major nested arrays.
pub type MatrixRows = Vec<Vec<Entry>>;

pub fn complex(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_rows(m: &CMatrix) -> MatrixRows {
    m.row_iter()
        .map(|r| r.iter().map(|z| Entry::Complex(complex(*z))).collect())
        .collect()
}

pub fn operator_rows(a: &Operator) -> MatrixRows {
    matrix_rows(a.matrix())
}

pub fn rows_to_matrix(rows: &MatrixRows, expected: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != expected {
        return Err(Error::Parse(format!(
            "{what}: expected {expected} rows, found {}",
            rows.len()
        )));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != expected) {
        return Err(Error::Parse(format!(
            "{what}: row {i} has {} entries, expected {expected}",
            r.len()
        )));
    }
    Ok(CMatrix::from_fn(expected, expected, |i, j| {
        rows[i][j].into()
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum Repr {
    Kraus(Vec<MatrixRows>),
    Choi(MatrixRows),
    Superop(MatrixRows),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub name: String,
    pub dim: usize,
    pub repr: Repr,
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Parse("dim must be at least 1".into()));
    }
    if n > MAX_DIM {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

impl ChannelFile {
    /// Kraus or Choi form when the map was built from one, superoperator otherwise.
    pub fn from_map(phi: &MapDescriptor) -> Self {
        let repr = match phi.provenance() {
            Some(Provenance::Kraus(ks)) => Repr::Kraus(ks.iter().map(operator_rows).collect()),
            Some(Provenance::Choi(c)) => Repr::Choi(matrix_rows(c)),
            _ => Repr::Superop(matrix_rows(phi.superop())),
        };
        ChannelFile {
            name: phi.name().to_string(),
            dim: phi.dim(),
            repr,
        }
    }

    pub fn to_map(&self) -> Result<MapDescriptor> {
        let n = self.dim;
        check_dim(n)?;
        match &self.repr {
            Repr::Kraus(ks) => {
                let ops = ks
                    .iter()
                    .enumerate()
                    .map(|(i, k)| {
                        Operator::new(rows_to_matrix(k, n, &format!("Kraus operator {i}"))?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                MapDescriptor::from_kraus(self.name.clone(), ops)
            }
            Repr::Choi(c) => {
                MapDescriptor::from_choi(self.name.clone(), n, rows_to_matrix(c, n * n, "choi")?)
            }
            Repr::Superop(s) => MapDescriptor::from_superop(
                self.name.clone(),
                n,
                rows_to_matrix(s, n * n, "superop")?,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub data: MatrixRows,
}

impl OperatorFile {
    pub fn from_operator(name: Option<String>, a: &Operator) -> Self {
        OperatorFile {
            name,
            dim: a.dim(),
            data: operator_rows(a),
        }
    }

    pub fn to_operator(&self) -> Result<Operator> {
        check_dim(self.dim)?;
        Operator::new(rows_to_matrix(&self.data, self.dim, "operator")?)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_channel(text: &str) -> Result<MapDescriptor> {
    parse::<ChannelFile>(text)?.to_map()
}

pub fn parse_operator(text: &str) -> Result<Operator> {
    parse::<OperatorFile>(text)?.to_operator()
}

/// Pretty-printed JSON with every float at 17 significant digits.
/// Non-finite floats become `null`.
pub struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Default for FullPrecision<'_> {
    fn default() -> Self {
        FullPrecision(PrettyFormatter::new())
    }
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision::default());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Params;
    use crate::zoo;

    #[test]
    fn floats_round_trip_exactly() {
        let xs = [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ];
        let text = to_json(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, xs);
        assert!(text.contains("3.3333333333333331e-1"));
        assert_eq!(
            to_json(&[f64::NAN])
                .unwrap()
                .trim()
                .replace(char::is_whitespace, ""),
            "[null]"
        );
    }

    #[test]
    fn channel_files_round_trip_in_every_form() {
        let e = zoo::make("depolarizing", 2, &Params::new()).unwrap();
        let kraus = ChannelFile::from_map(&e.map);
        let choi = ChannelFile {
            repr: Repr::Choi(matrix_rows(&e.map.choi())),
            ..kraus.clone()
        };
        let superop = ChannelFile {
            repr: Repr::Superop(matrix_rows(e.map.superop())),
            ..kraus.clone()
        };
        for f in [kraus, choi, superop] {
            let back = parse_channel(&to_json(&f).unwrap()).unwrap();
            assert!((back.superop() - e.map.superop()).norm() < 1e-15);
            assert_eq!(back.name(), e.map.name());
        }
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_channel("{").is_err());
        assert!(parse_channel(
            r#"{"name":"x","dim":2,"repr":{"kind":"kraus","data":[[[1,0],[0,1]]]}}"#
        )
        .is_ok());
        assert!(parse_channel(
            r#"{"name":"x","dim":3,"repr":{"kind":"kraus","data":[[[1,0],[0,1]]]}}"#
        )
        .is_err());
        assert!(
            parse_channel(r#"{"name":"x","dim":2,"repr":{"kind":"other","data":[]}}"#).is_err()
        );
        assert!(
            parse_channel(r#"{"name":"x","dim":0,"repr":{"kind":"superop","data":[]}}"#).is_err()
        );
        assert!(matches!(
            parse_channel(r#"{"name":"x","dim":13,"repr":{"kind":"superop","data":[]}}"#),
            Err(Error::TooLarge(13))
        ));
        let op = parse_operator(r#"{"dim":2,"data":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#).unwrap();
        assert_eq!(op, Operator::unit(2, 0, 1));
        assert!(parse_operator(r#"{"dim":2,"data":[[1,0,0],[0,1]]}"#).is_err());
    }
}
