//! Surface syntax tree of declaration files.

use crate::error::Span;

/// `NAME[v1 v2 ...]`
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub name: String,
    pub vars: Vec<String>,
    pub span: Span,
}

/// `{ t1 t2 ... }`: a set of predicate terms.
#[derive(Clone, Debug, PartialEq)]
pub struct AssertionExpr {
    pub terms: Vec<Term>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Skip(Span),
    Abort(Span),
    Init {
        vars: Vec<String>,
        span: Span,
    },
    Unitary {
        vars: Vec<String>,
        op: String,
        span: Span,
    },
    /// At least two children, none of which is itself a `Seq`.
    Seq(Vec<Stmt>),
    /// At least two branches, none of which is itself an `NDet`.
    NDet(Vec<Stmt>, Span),
    If {
        meas: String,
        vars: Vec<String>,
        then_branch: Box<Stmt>,
        else_branch: Box<Stmt>,
        span: Span,
    },
    While {
        meas: String,
        vars: Vec<String>,
        body: Box<Stmt>,
        invariant: Option<AssertionExpr>,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Skip(s) | Stmt::Abort(s) | Stmt::NDet(_, s) => *s,
            Stmt::Init { span, .. }
            | Stmt::Unitary { span, .. }
            | Stmt::If { span, .. }
            | Stmt::While { span, .. } => *span,
            Stmt::Seq(children) => children.first().map(Stmt::span).unwrap_or_default(),
        }
    }

    /// Sequential composition with nested sequences flattened.
    pub fn seq(children: Vec<Stmt>) -> Stmt {
        let mut flat = Vec::new();
        for c in children {
            match c {
                Stmt::Seq(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Stmt::Seq(flat)
        }
    }

    /// Nondeterministic choice with nested choices flattened.
    pub fn ndet(branches: Vec<Stmt>, span: Span) -> Stmt {
        let mut flat = Vec::new();
        for b in branches {
            match b {
                Stmt::NDet(inner, _) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Stmt::NDet(flat, span)
        }
    }

    /// Quantum variables mentioned by statements, in first-occurrence order.
    pub fn quantum_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        let mut add = |vs: &[String]| {
            for v in vs {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        };
        match self {
            Stmt::Skip(_) | Stmt::Abort(_) => {}
            Stmt::Init { vars, .. } | Stmt::Unitary { vars, .. } => add(vars),
            Stmt::Seq(cs) | Stmt::NDet(cs, _) => cs.iter().for_each(|c| c.collect_vars(out)),
            Stmt::If {
                vars,
                then_branch,
                else_branch,
                ..
            } => {
                add(vars);
                then_branch.collect_vars(out);
                else_branch.collect_vars(out);
            }
            Stmt::While { vars, body, .. } => {
                add(vars);
                body.collect_vars(out);
            }
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Stmt::While { .. } => true,
            Stmt::Seq(cs) | Stmt::NDet(cs, _) => cs.iter().any(Stmt::contains_loop),
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.contains_loop() || else_branch.contains_loop(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofDecl {
    pub register: Vec<String>,
    pub pre: Option<AssertionExpr>,
    pub body: Stmt,
    pub post: AssertionExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Load {
        name: String,
        path: String,
        span: Span,
    },
    Proof {
        name: String,
        proof: ProofDecl,
        span: Span,
    },
    Show {
        name: String,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct DeclarationFile {
    pub decls: Vec<Decl>,
}
