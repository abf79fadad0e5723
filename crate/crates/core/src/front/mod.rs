//! Surface language: lexer, parser, printer and static checks.

pub mod ast;
pub mod builtins;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod typecheck;

pub use ast::{AssertionExpr, Decl, DeclarationFile, ProofDecl, Stmt, Term};
pub use builtins::{builtins, Env, EnvEntry};
pub use parser::{parse, parse_stmts};
pub use typecheck::{typecheck, typecheck_proof, CheckedProof};
