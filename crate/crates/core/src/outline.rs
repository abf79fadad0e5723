//! Proof outlines: naming of computed predicates and text rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::assertion::Assertion;
use crate::front::pretty::{print_proof, Annotator};
use crate::front::CheckedProof;
use crate::linalg::{self, Mat, C64};
use crate::program::{NamedTerm, Node};
use crate::register::VarTuple;
use crate::wlp::WlpResult;

/// Entrywise distance under which a computed predicate reuses an existing name.
pub const NAME_TOL: f64 = 1e-9;
/// Magnitudes below this are printed as 0.
pub const DISPLAY_CHOP: f64 = 1e-12;
pub const SIGNIFICANT_DIGITS: usize = 6;

#[derive(Clone, Debug)]
pub struct NamedPredicate {
    pub name: String,
    pub vars: VarTuple,
    /// The predicate on `vars`.
    pub matrix: Mat,
    pub generated: bool,
}

impl NamedPredicate {
    pub fn label(&self) -> String {
        format!("{}[{}]", self.name, self.vars)
    }
}

/// Names available for rendering, plus the counter for generated `VARk` names.
/// One table is shared by all proofs of a file.
#[derive(Clone, Debug, Default)]
pub struct NameTable {
    generated: Vec<NamedPredicate>,
}

impl NameTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generated(&self) -> &[NamedPredicate] {
        &self.generated
    }

    pub fn get(&self, name: &str) -> Option<&NamedPredicate> {
        self.generated.iter().find(|p| p.name == name)
    }

    fn fresh(&mut self, register: &VarTuple, m: &Mat) -> String {
        let p = NamedPredicate {
            name: format!("VAR{}", self.generated.len()),
            vars: register.clone(),
            matrix: m.clone(),
            generated: true,
        };
        let label = p.label();
        self.generated.push(p);
        label
    }
}

/// Assigns labels to the preconditions of a transformer run.
pub struct Namer<'a> {
    table: &'a mut NameTable,
    register: VarTuple,
    user: Vec<NamedTerm>,
}

impl<'a> Namer<'a> {
    /// `user` holds the terms whose names may be reused (postcondition and invariants).
    pub fn new(table: &'a mut NameTable, register: VarTuple, user: Vec<NamedTerm>) -> Self {
        Namer { table, register, user }
    }

    pub fn label(&mut self, m: &Mat) -> String {
        if let Some(t) = self.user.iter().find(|t| linalg::max_abs_diff(&t.matrix, m) <= NAME_TOL) {
            return t.label();
        }
        if let Some(p) = self
            .table
            .generated
            .iter()
            .find(|p| p.vars == self.register && linalg::max_abs_diff(&p.matrix, m) <= NAME_TOL)
        {
            return p.label();
        }
        self.table.fresh(&self.register, m)
    }

    pub fn assertion_label(&mut self, a: &Assertion) -> String {
        a.iter().map(|m| self.label(m)).collect::<Vec<_>>().join(" ")
    }
}

/// Terms of the postcondition and every loop invariant of a proof.
pub fn reusable_terms(proof: &CheckedProof) -> Vec<NamedTerm> {
    fn walk(n: &Node, out: &mut Vec<NamedTerm>) {
        if let Node::While { invariant: Some(inv), .. } = n {
            out.extend(inv.terms.iter().cloned());
        }
        for c in n.children() {
            walk(c, out);
        }
    }
    let mut out = proof.post.terms.clone();
    walk(&proof.program.root, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct ProofOutline {
    pub text: String,
    /// Label of the precondition at each statement path.
    pub annotations: BTreeMap<Vec<usize>, String>,
    /// Label of the computed precondition of the whole program.
    pub verification_condition: String,
    /// One label per element of the computed precondition.
    pub condition_terms: Vec<String>,
}

struct PathLabels<'a>(&'a BTreeMap<Vec<usize>, String>);

impl Annotator for PathLabels<'_> {
    fn annotation(&self, path: &[usize]) -> Option<String> {
        self.0.get(path).cloned()
    }
}

/// Names every precondition in backward-visit order and renders the outline.
pub fn build_outline(proof: &CheckedProof, result: &WlpResult, table: &mut NameTable) -> ProofOutline {
    let mut namer = Namer::new(table, proof.register().clone(), reusable_terms(proof));
    let mut annotations = BTreeMap::new();
    for step in &result.steps {
        let label = namer.assertion_label(&step.pre);
        annotations.insert(step.path.clone(), label);
    }
    let condition_terms: Vec<String> = result.pre.iter().map(|m| namer.label(m)).collect();
    let verification_condition = condition_terms.join(" ");
    let text = print_proof(&proof.source, &PathLabels(&annotations), Some("verification condition"));
    ProofOutline {
        text,
        annotations,
        verification_condition,
        condition_terms,
    }
}

/// Fixed-precision rendering of a real number; exact zeros print as `0`.
pub fn render_real(x: f64) -> String {
    if x == 0.0 || x.abs() < DISPLAY_CHOP {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let exp = x.abs().log10().floor() as i32;
    let s = format!("{:.*e}", p - 1, x);
    let (mantissa, e) = s.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("integer exponent");
    if (-5..p as i32).contains(&exp) && (-5..p as i32).contains(&e) {
        let decimals = (p as i32 - 1 - e).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), e)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn render_complex(z: C64) -> String {
    let re = if z.re.abs() < DISPLAY_CHOP { 0.0 } else { z.re };
    let im = if z.im.abs() < DISPLAY_CHOP { 0.0 } else { z.im };
    match (re == 0.0, im == 0.0) {
        (_, true) => render_real(re),
        (true, false) => format!("{}i", render_real(im)),
        (false, false) => {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{}{}{}i", render_real(re), sign, render_real(im.abs()))
        }
    }
}

/// Row-per-line rendering with aligned columns.
pub fn render_matrix(m: &Mat) -> String {
    let cells: Vec<Vec<String>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| render_complex(m[(i, j)])).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for (i, row) in cells.iter().enumerate() {
        out.push_str(if i == 0 { "[[" } else { " [" });
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&padded.join(", "));
        out.push(']');
        out.push_str(if i + 1 == cells.len() { "]" } else { ",\n" });
    }
    out
}

pub fn render_named(label: &str, m: &Mat) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{label} =");
    s.push_str(&render_matrix(m));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn real_rendering() {
        assert_eq!(render_real(0.0), "0");
        assert_eq!(render_real(-0.0), "0");
        assert_eq!(render_real(1.0), "1");
        assert_eq!(render_real(-0.5), "-0.5");
        assert_eq!(render_real(std::f64::consts::FRAC_1_SQRT_2), "0.707107");
        assert_eq!(render_real(1.0 / 3.0), "0.333333");
        assert_eq!(render_real(123456.7), "123457");
        assert_eq!(render_real(1234567.0), "1.23457e6");
        assert_eq!(render_real(1.5e-7), "1.5e-7");
        assert_eq!(render_real(1e-15), "0");
    }

    #[test]
    fn complex_rendering() {
        assert_eq!(render_complex(c(0.5, -0.5)), "0.5-0.5i");
        assert_eq!(render_complex(c(0.0, 1.0)), "1i");
        assert_eq!(render_complex(c(2.0, 1e-17)), "2");
    }

    #[test]
    fn matrix_rendering() {
        let m = linalg::identity(2);
        assert_eq!(render_matrix(&m), "[[1, 0],\n [0, 1]]");
    }
}
