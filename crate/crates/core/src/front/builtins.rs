//! Name environment and the reserved operators.

use std::collections::BTreeMap;

use crate::error::{Error, Result, Span};
use crate::gates;
use crate::linalg::Mat;

#[derive(Clone, Debug)]
pub enum EnvEntry {
    /// Identity at whatever arity it is used.
    Identity,
    /// The zero predicate at whatever arity it is used.
    Zero,
    /// A fixed-arity operator; usage decides whether it must be unitary or a predicate.
    Matrix(Mat),
    /// Projectors for outcomes 0 and 1.
    Measurement(Mat, Mat),
}

impl EnvEntry {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EnvEntry::Identity | EnvEntry::Zero | EnvEntry::Matrix(_) => "operator",
            EnvEntry::Measurement(..) => "measurement",
        }
    }
}

pub const RESERVED: &[&str] = &[
    "I", "Zero", "X", "Y", "Z", "H", "CX", "P0", "P1", "Pp", "Pm", "M01", "Mpm",
];

#[derive(Clone, Debug)]
pub struct Env {
    entries: BTreeMap<String, EnvEntry>,
}

impl Env {
    pub fn empty() -> Self {
        Env {
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&EnvEntry> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn define(&mut self, name: &str, entry: EnvEntry, span: Span) -> Result<()> {
        if self.entries.contains_key(name) {
            return Err(Error::DuplicateName {
                name: name.to_string(),
                span,
            });
        }
        self.entries.insert(name.to_string(), entry);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

pub fn builtins() -> Env {
    let mut entries = BTreeMap::new();
    let mut put = |name: &str, e: EnvEntry| {
        entries.insert(name.to_string(), e);
    };
    put("I", EnvEntry::Identity);
    put("Zero", EnvEntry::Zero);
    put("X", EnvEntry::Matrix(gates::x()));
    put("Y", EnvEntry::Matrix(gates::y()));
    put("Z", EnvEntry::Matrix(gates::z()));
    put("H", EnvEntry::Matrix(gates::h()));
    put("CX", EnvEntry::Matrix(gates::cx()));
    put("P0", EnvEntry::Matrix(gates::p0()));
    put("P1", EnvEntry::Matrix(gates::p1()));
    put("Pp", EnvEntry::Matrix(gates::pp()));
    put("Pm", EnvEntry::Matrix(gates::pm()));
    put("M01", EnvEntry::Measurement(gates::p0(), gates::p1()));
    put("Mpm", EnvEntry::Measurement(gates::pp(), gates::pm()));
    Env { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};

    #[test]
    fn computational_measurement() {
        let env = builtins();
        let Some(EnvEntry::Measurement(p0, p1)) = env.get("M01") else {
            panic!()
        };
        assert_eq!(p0[(0, 0)], c(1.0, 0.0));
        assert_eq!(p1[(1, 1)], c(1.0, 0.0));
        assert_eq!(p0[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn hadamard_matches_definition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = crate::linalg::from_real_rows(&[&[s, s], &[s, -s]]);
        let Some(EnvEntry::Matrix(h)) = builtins().get("H").cloned() else {
            panic!()
        };
        assert!(max_abs_diff(&h, &expected) < 1e-15);
    }

    #[test]
    fn reserved_names_are_present() {
        let env = builtins();
        for name in RESERVED {
            assert!(env.contains(name), "{name}");
        }
    }

    #[test]
    fn redefinition_rejected() {
        let mut env = builtins();
        assert!(matches!(
            env.define("X", EnvEntry::Zero, Span::default()),
            Err(Error::DuplicateName { .. })
        ));
    }
}
