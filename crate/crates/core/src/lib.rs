//! Verification of nondeterministic quantum while-programs.
//!
//! Programs are written in a small declaration language, preconditions are
//! computed backward with weakest-liberal-precondition transformers, and the
//! resulting order questions between finite sets of predicates are decided
//! with checkable certificates.

pub mod assertion;
pub mod channel;
pub mod corpus;
pub mod error;
pub mod front;
pub mod gates;
pub mod generate;
pub mod linalg;
pub mod operator;
pub mod order;
pub mod outline;
pub mod program;
pub mod qmat;
pub mod register;
pub mod semantics;
pub mod verifier;
pub mod wlp;

pub use assertion::{expectation, Assertion};
pub use channel::{compose, sum, SuperOperator};
pub use error::{Error, Result, Span};
pub use linalg::{Mat, Tolerances, Vector, C64};
pub use operator::{
    extend, partial_trace_matrix, tensor, DensityOperator, LabeledOperator, ProjectiveMeasurement,
    QuantumPredicate,
};
pub use order::{inf_le, loewner_le, prune, Certificate, OrderDecision, OrderParams, Verdict};
pub use program::{Node, Program};
pub use register::VarTuple;
pub use semantics::{check_formula_empirical, denote_bounded, denote_loopfree, Mode, SemanticsSet};
pub use wlp::{check_invariant, wlp, wp_loopfree, TransformStep, WlpOptions, WlpResult};
pub use outline::{NameTable, ProofOutline};
pub use verifier::{error_exit_code, render_error, verify_file, verify_source, Report, VerifyOptions};
