//! Canonical printer for the surface syntax.
//!
//! Statements are addressed by paths of child indices from the proof body:
//! `Seq` and `NDet` children by position, `If` branches as 0 (then) and 1 (else),
//! and a `While` body as 0.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Supplies an annotation printed as `{ ... };` before a non-sequence statement.
pub trait Annotator {
    fn annotation(&self, path: &[usize]) -> Option<String>;
}

struct NoAnnotations;

impl Annotator for NoAnnotations {
    fn annotation(&self, _: &[usize]) -> Option<String> {
        None
    }
}

pub fn term_list(terms: &[Term]) -> String {
    terms
        .iter()
        .map(|t| format!("{}[{}]", t.name, t.vars.join(" ")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn assertion_text(a: &AssertionExpr) -> String {
    format!("{{ {} }}", term_list(&a.terms))
}

pub fn print_file(file: &DeclarationFile) -> String {
    let mut out = String::new();
    for d in &file.decls {
        match d {
            Decl::Load { name, path, .. } => {
                let _ = writeln!(out, "def {name} := load \"{path}\" end");
            }
            Decl::Proof { name, proof, .. } => {
                let _ = writeln!(out, "def {name} := {}", print_proof(proof, &NoAnnotations, None));
                out.push_str("end\n");
            }
            Decl::Show { name, .. } => {
                let _ = writeln!(out, "show {name} end");
            }
        }
    }
    out
}

pub fn print_stmt(s: &Stmt) -> String {
    let mut p = Printer {
        out: String::new(),
        annot: &NoAnnotations,
        vc_note: None,
    };
    p.stmt(s, 0, &mut Vec::new());
    p.out
}

/// Prints `proof[...] : ...` without the closing `end`. `vc_note` is appended as a
/// comment to the first annotation emitted.
pub fn print_proof(proof: &ProofDecl, annot: &dyn Annotator, vc_note: Option<&str>) -> String {
    let mut p = Printer {
        out: String::new(),
        annot,
        vc_note: vc_note.map(str::to_string),
    };
    let _ = writeln!(p.out, "proof [{}] :", proof.register.join(" "));
    if let Some(pre) = &proof.pre {
        let _ = writeln!(p.out, "{INDENT}{};", assertion_text(pre));
    }
    p.out.push_str(INDENT);
    p.stmt(&proof.body, 1, &mut Vec::new());
    p.out.push_str(";\n");
    let _ = writeln!(p.out, "{INDENT}{}", assertion_text(&proof.post));
    p.out
}

struct Printer<'a> {
    out: String,
    annot: &'a dyn Annotator,
    vc_note: Option<String>,
}

impl Printer<'_> {
    fn newline(&mut self, depth: usize) {
        self.out.push('\n');
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
    }

    fn annotate(&mut self, path: &[usize], depth: usize) {
        if let Some(text) = self.annot.annotation(path) {
            let _ = write!(self.out, "{{ {text} }};");
            if let Some(note) = self.vc_note.take() {
                let _ = write!(self.out, " // {note}");
            }
            self.newline(depth);
        }
    }

    fn stmt(&mut self, s: &Stmt, depth: usize, path: &mut Vec<usize>) {
        if !matches!(s, Stmt::Seq(_)) {
            self.annotate(path, depth);
        }
        match s {
            Stmt::Skip(_) => self.out.push_str("skip"),
            Stmt::Abort(_) => self.out.push_str("abort"),
            Stmt::Init { vars, .. } => {
                let _ = write!(self.out, "[{}] :=0", vars.join(" "));
            }
            Stmt::Unitary { vars, op, .. } => {
                let _ = write!(self.out, "[{}] *= {op}", vars.join(" "));
            }
            Stmt::Seq(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        self.out.push(';');
                        self.newline(depth);
                    }
                    path.push(i);
                    self.stmt(item, depth, path);
                    path.pop();
                }
            }
            Stmt::NDet(branches, _) => {
                self.out.push_str("( ");
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        self.newline(depth);
                        self.out.push_str("# ");
                    }
                    path.push(i);
                    self.stmt(b, depth + 1, path);
                    path.pop();
                }
                self.out.push_str(" )");
            }
            Stmt::If {
                meas,
                vars,
                then_branch,
                else_branch,
                ..
            } => {
                let _ = write!(self.out, "if {meas}[{}] then", vars.join(" "));
                self.newline(depth + 1);
                path.push(0);
                self.stmt(then_branch, depth + 1, path);
                path.pop();
                self.newline(depth);
                self.out.push_str("else");
                self.newline(depth + 1);
                path.push(1);
                self.stmt(else_branch, depth + 1, path);
                path.pop();
                self.newline(depth);
                self.out.push_str("end");
            }
            Stmt::While {
                meas,
                vars,
                body,
                invariant,
                ..
            } => {
                if let Some(inv) = invariant {
                    let _ = write!(self.out, "{{ inv: {} }};", term_list(&inv.terms));
                    self.newline(depth);
                }
                let _ = write!(self.out, "while {meas}[{}] do", vars.join(" "));
                self.newline(depth + 1);
                path.push(0);
                self.stmt(body, depth + 1, path);
                path.pop();
                self.newline(depth);
                self.out.push_str("end");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse, parse_stmts};
    use super::*;

    #[test]
    fn file_round_trip() {
        let src = r#"
def invN := load "invN.npy" end
def pf := proof[q1 q2] :
    { I[q1] };
    [q1 q2] :=0;
    { inv: invN[q1 q2] };
    while MQWalk[q1 q2] do
        ( [q1 q2] *= W1; [q1 q2] *= W2
        # [q1 q2] *= W2; [q1 q2] *= W1 )
    end;
    { Zero[q1] }
end
show pf end
"#;
        let ast = parse(src).unwrap();
        let printed = print_file(&ast);
        assert_eq!(parse(&printed).unwrap(), ast);
        assert_eq!(print_file(&parse(&printed).unwrap()), printed);
    }

    #[test]
    fn nested_statement_round_trip() {
        let s = parse_stmts(
            "if M01[q2] then if M01[q1] then [q] *= X end else ( skip # abort; [q] :=0 ) end",
        )
        .unwrap();
        assert_eq!(parse_stmts(&print_stmt(&s)).unwrap(), s);
    }
}
