//! Bundled example programs with their expected outcomes.

use crate::error::Error;
use crate::order::Verdict;
use crate::verifier::{verify_source, MemSource, Report, VerifyOptions};

const OPERATORS: &[(&str, &str)] = &[
    ("c0x.qmat.json", include_str!("../corpus/c0x.qmat.json")),
    ("deutsch_post.qmat.json", include_str!("../corpus/deutsch_post.qmat.json")),
    ("deutsch_wrong_post.qmat.json", include_str!("../corpus/deutsch_wrong_post.qmat.json")),
    ("half.qmat.json", include_str!("../corpus/half.qmat.json")),
    ("psi_i.qmat.json", include_str!("../corpus/psi_i.qmat.json")),
    ("psi_plus_i.qmat.json", include_str!("../corpus/psi_plus_i.qmat.json")),
    ("qwalk_invN.qmat.json", include_str!("../corpus/qwalk_invN.qmat.json")),
    ("qwalk_meas.qmat.json", include_str!("../corpus/qwalk_meas.qmat.json")),
    ("qwalk_w1.qmat.json", include_str!("../corpus/qwalk_w1.qmat.json")),
    ("qwalk_w2.qmat.json", include_str!("../corpus/qwalk_w2.qmat.json")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Verdict(Verdict),
    InvalidInvariant,
}

#[derive(Clone, Copy, Debug)]
pub struct Example {
    pub name: &'static str,
    pub source: &'static str,
    pub expected: Expected,
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "qwalk",
        source: include_str!("../corpus/qwalk.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "qwalk_bad_invariant",
        source: include_str!("../corpus/qwalk_bad_invariant.nqpv"),
        expected: Expected::InvalidInvariant,
    },
    Example {
        name: "errcorr_0",
        source: include_str!("../corpus/errcorr_0.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "errcorr_1",
        source: include_str!("../corpus/errcorr_1.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "errcorr_plus",
        source: include_str!("../corpus/errcorr_plus.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "errcorr_i",
        source: include_str!("../corpus/errcorr_i.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "deutsch",
        source: include_str!("../corpus/deutsch.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "deutsch_wrong",
        source: include_str!("../corpus/deutsch_wrong.nqpv"),
        expected: Expected::Verdict(Verdict::Fails),
    },
    Example {
        name: "half_fails",
        source: include_str!("../corpus/half_fails.nqpv"),
        expected: Expected::Verdict(Verdict::Fails),
    },
    Example {
        name: "half_holds",
        source: include_str!("../corpus/half_holds.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
    Example {
        name: "errcorr6",
        source: include_str!("../corpus/errcorr6.nqpv"),
        expected: Expected::Verdict(Verdict::Holds),
    },
];

/// The bundled operator files, as a source for `load` paths.
pub fn operator_files() -> MemSource {
    OPERATORS
        .iter()
        .fold(MemSource::default(), |s, (path, text)| s.with(path, text.as_bytes()))
}

pub fn example(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

pub fn run_example(e: &Example, opts: &VerifyOptions) -> crate::Result<Report> {
    verify_source(e.source, &operator_files(), opts)
}

#[derive(Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub expected: Expected,
    /// What happened, in the same terms as `expected`; `None` for any other error.
    pub actual: Option<Expected>,
    pub detail: String,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.actual == Some(self.expected)
    }
}

fn classify(result: &crate::Result<Report>) -> (Option<Expected>, String) {
    match result {
        Ok(r) => {
            let v = match r.exit_code() {
                0 => Verdict::Holds,
                1 => Verdict::Fails,
                _ => Verdict::Inconclusive,
            };
            (Some(Expected::Verdict(v)), v.to_string())
        }
        Err(Error::InvalidInvariant { invariant, .. }) => {
            (Some(Expected::InvalidInvariant), format!("invalid invariant {invariant}"))
        }
        Err(e) => (None, e.to_string()),
    }
}

pub fn run_corpus(opts: &VerifyOptions) -> Vec<Outcome> {
    EXAMPLES
        .iter()
        .map(|e| {
            let (actual, detail) = classify(&run_example(e, opts));
            Outcome {
                name: e.name,
                expected: e.expected,
                actual,
                detail,
            }
        })
        .collect()
}
