//! Operator files.
//!
//! JSON (`qmat-v1`):
//! `{"kind": "unitary" | "hermitian" | "measurement", "shape": [d, d] | [2, d, d], "data": [[re, im], ...]}`
//! with row-major entries; a measurement stores `P0` then `P1`.
//!
//! Binary: the magic `QMAT1`, one kind byte (0 unitary, 1 hermitian,
//! 2 measurement), the dimension as a little-endian `u32`, then `(re, im)`
//! pairs as little-endian `f64`, row-major, one or two blocks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::EnvEntry;
use crate::linalg::{self, c, Mat, Tolerances};
use crate::operator::check_measurement;

pub const MAGIC: &[u8; 5] = b"QMAT1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Hermitian,
    Measurement,
}

impl OperatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Unitary => "unitary",
            OperatorKind::Hermitian => "hermitian",
            OperatorKind::Measurement => "measurement",
        }
    }

    fn code(self) -> u8 {
        match self {
            OperatorKind::Unitary => 0,
            OperatorKind::Hermitian => 1,
            OperatorKind::Measurement => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadedOperator {
    Unitary(Mat),
    Hermitian(Mat),
    Measurement(Mat, Mat),
}

impl LoadedOperator {
    pub fn kind(&self) -> OperatorKind {
        match self {
            LoadedOperator::Unitary(_) => OperatorKind::Unitary,
            LoadedOperator::Hermitian(_) => OperatorKind::Hermitian,
            LoadedOperator::Measurement(..) => OperatorKind::Measurement,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LoadedOperator::Unitary(m) | LoadedOperator::Hermitian(m) | LoadedOperator::Measurement(m, _) => m.nrows(),
        }
    }

    fn blocks(&self) -> Vec<&Mat> {
        match self {
            LoadedOperator::Unitary(m) | LoadedOperator::Hermitian(m) => vec![m],
            LoadedOperator::Measurement(a, b) => vec![a, b],
        }
    }

    pub fn into_env_entry(self) -> EnvEntry {
        match self {
            LoadedOperator::Unitary(m) | LoadedOperator::Hermitian(m) => EnvEntry::Matrix(m),
            LoadedOperator::Measurement(a, b) => EnvEntry::Measurement(a, b),
        }
    }

    /// Checks the invariant implied by the declared kind.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        match self {
            LoadedOperator::Unitary(m) => {
                if !linalg::is_unitary(m, tol.herm) {
                    return Err(Error::Validation("declared unitary but U†U ≠ I".into()));
                }
            }
            LoadedOperator::Hermitian(m) => {
                let defect = linalg::hermiticity_defect(m);
                if defect > tol.herm {
                    return Err(Error::Validation(format!(
                        "declared hermitian but ‖M − M†‖ = {defect:.3e}"
                    )));
                }
            }
            LoadedOperator::Measurement(p0, p1) => {
                check_measurement(p0, p1, tol)
                    .map_err(|e| Error::Validation(format!("invalid measurement: {e}")))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QmatJson {
    kind: String,
    shape: Vec<usize>,
    data: Vec<[f64; 2]>,
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    let mut off = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return off + column.saturating_sub(1).min(l.len());
        }
        off += l.len();
    }
    text.len()
}

fn key_offset(text: &str, key: &str) -> usize {
    text.find(&format!("\"{key}\"")).unwrap_or(0)
}

fn parse_kind(s: &str) -> Option<OperatorKind> {
    match s {
        "unitary" => Some(OperatorKind::Unitary),
        "hermitian" => Some(OperatorKind::Hermitian),
        "measurement" => Some(OperatorKind::Measurement),
        _ => None,
    }
}

fn assemble(kind: OperatorKind, d: usize, entries: &[(f64, f64)]) -> LoadedOperator {
    let block = |b: usize| Mat::from_fn(d, d, |i, j| {
        let (re, im) = entries[b * d * d + i * d + j];
        c(re, im)
    });
    match kind {
        OperatorKind::Unitary => LoadedOperator::Unitary(block(0)),
        OperatorKind::Hermitian => LoadedOperator::Hermitian(block(0)),
        OperatorKind::Measurement => LoadedOperator::Measurement(block(0), block(1)),
    }
}

fn check_dim(d: usize, offset: usize) -> Result<()> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::Format {
            offset,
            message: format!("dimension {d} is not a power of two"),
        });
    }
    Ok(())
}

/// Parses a JSON operator without validating it.
pub fn parse_json(text: &str) -> Result<LoadedOperator> {
    let raw: QmatJson = serde_json::from_str(text).map_err(|e| Error::Format {
        offset: offset_of(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let kind = parse_kind(&raw.kind).ok_or_else(|| Error::Format {
        offset: key_offset(text, "kind"),
        message: format!("unknown kind `{}`", raw.kind),
    })?;
    let shape_at = key_offset(text, "shape");
    let d = match (kind, raw.shape.as_slice()) {
        (OperatorKind::Measurement, [2, a, b]) | (OperatorKind::Unitary | OperatorKind::Hermitian, [a, b]) if a == b => *a,
        _ => {
            return Err(Error::Format {
                offset: shape_at,
                message: format!("shape {:?} does not fit kind `{}`", raw.shape, raw.kind),
            })
        }
    };
    check_dim(d, shape_at)?;
    let blocks = if kind == OperatorKind::Measurement { 2 } else { 1 };
    if raw.data.len() != blocks * d * d {
        return Err(Error::Format {
            offset: key_offset(text, "data"),
            message: format!("expected {} entries, found {}", blocks * d * d, raw.data.len()),
        });
    }
    let entries: Vec<(f64, f64)> = raw.data.iter().map(|p| (p[0], p[1])).collect();
    Ok(assemble(kind, d, &entries))
}

/// Parses the binary form without validating it.
pub fn parse_binary(bytes: &[u8]) -> Result<LoadedOperator> {
    let fmt_err = |offset: usize, message: &str| Error::Format {
        offset,
        message: message.to_string(),
    };
    if bytes.len() < 10 || &bytes[..5] != MAGIC {
        return Err(fmt_err(0, "missing QMAT1 header"));
    }
    let kind = match bytes[5] {
        0 => OperatorKind::Unitary,
        1 => OperatorKind::Hermitian,
        2 => OperatorKind::Measurement,
        _ => return Err(fmt_err(5, "unknown kind byte")),
    };
    let d = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    check_dim(d, 6)?;
    let blocks = if kind == OperatorKind::Measurement { 2 } else { 1 };
    let needed = 10 + blocks * d * d * 16;
    if bytes.len() != needed {
        return Err(fmt_err(bytes.len().min(needed), &format!("expected {needed} bytes, found {}", bytes.len())));
    }
    let entries: Vec<(f64, f64)> = bytes[10..]
        .chunks_exact(16)
        .map(|ch| {
            (
                f64::from_le_bytes(ch[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(ch[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(assemble(kind, d, &entries))
}

/// Parses either encoding and validates the declared kind.
pub fn parse_operator(bytes: &[u8], tol: &Tolerances) -> Result<LoadedOperator> {
    let op = if bytes.starts_with(MAGIC) {
        parse_binary(bytes)?
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Format {
            offset: e.valid_up_to(),
            message: "file is neither QMAT1 binary nor UTF-8 JSON".into(),
        })?;
        parse_json(text)?
    };
    op.validate(tol)?;
    Ok(op)
}

pub fn load_operator(path: &Path, tol: &Tolerances) -> Result<LoadedOperator> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_operator(&bytes, tol)
}

pub fn to_json(op: &LoadedOperator) -> String {
    let d = op.dim();
    let shape = if op.kind() == OperatorKind::Measurement {
        vec![2, d, d]
    } else {
        vec![d, d]
    };
    let data = op
        .blocks()
        .into_iter()
        .flat_map(|m| {
            (0..d).flat_map(move |i| (0..d).map(move |j| [m[(i, j)].re, m[(i, j)].im]))
        })
        .collect();
    let raw = QmatJson {
        kind: op.kind().as_str().to_string(),
        shape,
        data,
    };
    serde_json::to_string(&raw).expect("serialisable")
}

pub fn to_binary(op: &LoadedOperator) -> Vec<u8> {
    let d = op.dim();
    let mut out = Vec::with_capacity(10 + 16 * d * d * 2);
    out.extend_from_slice(MAGIC);
    out.push(op.kind().code());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for m in op.blocks() {
        for i in 0..d {
            for j in 0..d {
                out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
                out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
            }
        }
    }
    out
}

pub fn save_json(path: &Path, op: &LoadedOperator) -> Result<()> {
    std::fs::write(path, to_json(op)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    #[test]
    fn identity_file() {
        let text = r#"{"kind": "hermitian", "shape": [4, 4], "data": [
            [1,0],[0,0],[0,0],[0,0], [0,0],[1,0],[0,0],[0,0],
            [0,0],[0,0],[1,0],[0,0], [0,0],[0,0],[0,0],[1,0]]}"#;
        let op = parse_operator(text.as_bytes(), &Tolerances::default()).unwrap();
        let LoadedOperator::Hermitian(m) = op else { panic!() };
        assert_eq!(m, linalg::identity(4));
    }

    #[test]
    fn round_trips() {
        let op = LoadedOperator::Measurement(gates::pp(), gates::pm());
        let tol = Tolerances::default();
        for bytes in [to_json(&op).into_bytes(), to_binary(&op)] {
            let LoadedOperator::Measurement(a, b) = parse_operator(&bytes, &tol).unwrap() else {
                panic!()
            };
            assert_eq!(a, gates::pp());
            assert_eq!(b, gates::pm());
        }
    }

    #[test]
    fn incomplete_measurement_rejected() {
        let op = LoadedOperator::Measurement(gates::p0(), gates::p0());
        let err = parse_operator(to_json(&op).as_bytes(), &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn syntax_error_offset() {
        let text = "{\"kind\": \"unitary\",\n \"shape\": [2, 2], \"data\": [[1, 0] [0, 0]]}";
        match parse_json(text).unwrap_err() {
            Error::Format { offset, .. } => assert_eq!(&text[offset..offset + 1], "["),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_shape_rejected() {
        let text = r#"{"kind": "unitary", "shape": [3, 3], "data": []}"#;
        assert!(matches!(parse_json(text), Err(Error::Format { .. })));
    }

    #[test]
    fn non_unitary_rejected() {
        let op = LoadedOperator::Unitary(gates::p0());
        assert!(matches!(
            parse_operator(&to_binary(&op), &Tolerances::default()),
            Err(Error::Validation(_))
        ));
    }
}
