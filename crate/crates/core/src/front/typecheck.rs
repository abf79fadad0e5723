//! Static checks and lowering of proofs to the checked program representation.

use super::ast::{AssertionExpr, Decl, DeclarationFile, ProofDecl, Stmt, Term};
use super::builtins::{Env, EnvEntry};
use crate::channel::SuperOperator;
use crate::error::{Error, Result, Span};
use crate::linalg::{self, Mat, Tolerances};
use crate::operator::{check_measurement, check_predicate, extend_matrix};
use crate::program::{Measurement, NamedAssertion, NamedTerm, Node, Program};
use crate::register::VarTuple;

#[derive(Clone, Debug)]
pub struct CheckedProof {
    pub name: String,
    pub program: Program,
    pub pre: Option<NamedAssertion>,
    pub post: NamedAssertion,
    /// Surface form, kept for rendering outlines.
    pub source: ProofDecl,
}

impl CheckedProof {
    pub fn register(&self) -> &VarTuple {
        &self.program.register
    }
}

/// Checks every proof of `file`; load declarations must already be bound in `env`.
pub fn typecheck(file: &DeclarationFile, env: &Env, tol: &Tolerances) -> Result<Vec<CheckedProof>> {
    let mut out = Vec::new();
    for d in &file.decls {
        match d {
            Decl::Load { name, span, .. } => {
                if !env.contains(name) {
                    return Err(Error::UnknownName {
                        name: name.clone(),
                        span: *span,
                    });
                }
            }
            Decl::Proof { name, proof, .. } => out.push(typecheck_proof(name, proof, env, tol)?),
            Decl::Show { .. } => {}
        }
    }
    Ok(out)
}

pub fn typecheck_proof(name: &str, proof: &ProofDecl, env: &Env, tol: &Tolerances) -> Result<CheckedProof> {
    let register = VarTuple::new(proof.register.iter().cloned())?;
    let cx = Checker { env, tol, register };
    let root = cx.stmt(&proof.body)?;
    let pre = proof.pre.as_ref().map(|a| cx.assertion(a)).transpose()?;
    let post = cx.assertion(&proof.post)?;
    Ok(CheckedProof {
        name: name.to_string(),
        program: Program {
            register: cx.register,
            root,
        },
        pre,
        post,
        source: proof.clone(),
    })
}

struct Checker<'a> {
    env: &'a Env,
    tol: &'a Tolerances,
    register: VarTuple,
}

impl Checker<'_> {
    fn vars(&self, vars: &[String], span: Span) -> Result<VarTuple> {
        let t = VarTuple::new(vars.iter().cloned())
            .map_err(|e| Error::InvalidVars(format!("{span}: {e}")))?;
        for v in t.names() {
            if !self.register.contains(v) {
                return Err(Error::UndeclaredVariable {
                    var: v.clone(),
                    span,
                });
            }
        }
        Ok(t)
    }

    fn lookup(&self, name: &str, span: Span) -> Result<&EnvEntry> {
        self.env.get(name).ok_or_else(|| Error::UnknownName {
            name: name.to_string(),
            span,
        })
    }

    fn arity(&self, name: &str, m: &Mat, vars: &VarTuple, span: Span) -> Result<()> {
        if m.nrows() != vars.dim() {
            return Err(Error::ArityMismatch {
                name: name.to_string(),
                expected: linalg::qubit_count(m.nrows()).unwrap_or(0),
                vars: vars.to_string(),
                span,
            });
        }
        Ok(())
    }

    fn unitary(&self, name: &str, vars: &VarTuple, span: Span) -> Result<Mat> {
        let local = match self.lookup(name, span)? {
            EnvEntry::Identity => linalg::identity(vars.dim()),
            EnvEntry::Matrix(m) => {
                self.arity(name, m, vars, span)?;
                if !linalg::is_unitary(m, self.tol.herm.max(1e-9)) {
                    return Err(Error::NotUnitary {
                        name: name.to_string(),
                        span,
                    });
                }
                m.clone()
            }
            EnvEntry::Zero | EnvEntry::Measurement(..) => {
                return Err(Error::NotUnitary {
                    name: name.to_string(),
                    span,
                })
            }
        };
        extend_matrix(&local, vars, &self.register)
    }

    fn measurement(&self, name: &str, vars: &VarTuple, span: Span) -> Result<Measurement> {
        let (p0, p1) = match self.lookup(name, span)? {
            EnvEntry::Measurement(p0, p1) => (p0, p1),
            _ => {
                return Err(Error::NotMeasurement {
                    name: name.to_string(),
                    span,
                })
            }
        };
        self.arity(name, p0, vars, span)?;
        check_measurement(p0, p1, self.tol).map_err(|_| Error::NotMeasurement {
            name: name.to_string(),
            span,
        })?;
        Ok(Measurement {
            name: name.to_string(),
            vars: vars.clone(),
            p0: extend_matrix(p0, vars, &self.register)?,
            p1: extend_matrix(p1, vars, &self.register)?,
        })
    }

    fn term(&self, t: &Term) -> Result<NamedTerm> {
        let vars = self.vars(&t.vars, t.span)?;
        let local = match self.lookup(&t.name, t.span)? {
            EnvEntry::Identity => linalg::identity(vars.dim()),
            EnvEntry::Zero => linalg::zeros(vars.dim()),
            EnvEntry::Matrix(m) => {
                self.arity(&t.name, m, &vars, t.span)?;
                check_predicate(m, self.tol).map_err(|_| Error::NotPredicate {
                    name: t.name.clone(),
                    span: t.span,
                })?;
                m.clone()
            }
            EnvEntry::Measurement(..) => {
                return Err(Error::NotPredicate {
                    name: t.name.clone(),
                    span: t.span,
                })
            }
        };
        Ok(NamedTerm {
            name: t.name.clone(),
            matrix: extend_matrix(&local, &vars, &self.register)?,
            vars,
        })
    }

    fn assertion(&self, a: &AssertionExpr) -> Result<NamedAssertion> {
        let terms = a.terms.iter().map(|t| self.term(t)).collect::<Result<Vec<_>>>()?;
        NamedAssertion::from_terms(&self.register, terms)
    }

    fn stmt(&self, s: &Stmt) -> Result<Node> {
        Ok(match s {
            Stmt::Skip(_) => Node::Skip,
            Stmt::Abort(_) => Node::Abort,
            Stmt::Init { vars, span } => {
                let vars = self.vars(vars, *span)?;
                let channel = SuperOperator::set_zero(vars.clone()).extend(&self.register)?;
                Node::Init { vars, channel }
            }
            Stmt::Unitary { vars, op, span } => {
                let vars = self.vars(vars, *span)?;
                let matrix = self.unitary(op, &vars, *span)?;
                Node::Unitary {
                    vars,
                    name: op.clone(),
                    matrix,
                }
            }
            Stmt::Seq(items) => Node::Seq(items.iter().map(|i| self.stmt(i)).collect::<Result<_>>()?),
            Stmt::NDet(items, _) => Node::NDet(items.iter().map(|i| self.stmt(i)).collect::<Result<_>>()?),
            Stmt::If {
                meas,
                vars,
                then_branch,
                else_branch,
                span,
            } => {
                let vars = self.vars(vars, *span)?;
                Node::If {
                    meas: self.measurement(meas, &vars, *span)?,
                    then_branch: Box::new(self.stmt(then_branch)?),
                    else_branch: Box::new(self.stmt(else_branch)?),
                }
            }
            Stmt::While {
                meas,
                vars,
                body,
                invariant,
                span,
            } => {
                let vars = self.vars(vars, *span)?;
                Node::While {
                    meas: self.measurement(meas, &vars, *span)?,
                    body: Box::new(self.stmt(body)?),
                    invariant: invariant.as_ref().map(|a| self.assertion(a)).transpose()?,
                    span: *span,
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::builtins::builtins;
    use super::super::parser::parse;
    use super::*;

    fn check(src: &str) -> Result<Vec<CheckedProof>> {
        typecheck(&parse(src)?, &builtins(), &Tolerances::default())
    }

    #[test]
    fn arity_mismatch() {
        let err = check("def p := proof[q1 q2]: [q1 q2] *= X; {I[q1]} end").unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { ref name, .. } if name == "X"));
    }

    #[test]
    fn scaled_identity_not_predicate() {
        let mut env = builtins();
        env.define("Twice", EnvEntry::Matrix(linalg::identity(2).scale(2.0)), Span::default())
            .unwrap();
        let ast = parse("def p := proof[q]: skip; {Twice[q]} end").unwrap();
        let err = typecheck(&ast, &env, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::NotPredicate { ref name, .. } if name == "Twice"));
    }

    #[test]
    fn error_correction_checks_clean() {
        let src = "def p := proof[q q1 q2]:
            [q1 q2] :=0;
            [q q1] *= CX; [q q2] *= CX;
            ( skip # [q] *= X # [q1] *= X # [q2] *= X );
            [q q2] *= CX; [q q1] *= CX;
            if M01[q2] then if M01[q1] then [q] *= X end end;
            {P0[q]}
        end";
        let proofs = check(src).unwrap();
        assert_eq!(proofs[0].register().len(), 3);
    }

    #[test]
    fn unknown_name_located() {
        let err = check("def p := proof[q]:\n skip;\n {Foo[q]} end").unwrap_err();
        match err {
            Error::UnknownName { name, span } => {
                assert_eq!(name, "Foo");
                assert_eq!(span.line, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn measurement_required_for_if() {
        let err = check("def p := proof[q]: if X[q] then skip end; {I[q]} end").unwrap_err();
        assert!(matches!(err, Error::NotMeasurement { .. }));
    }

    #[test]
    fn predicate_is_not_unitary() {
        let err = check("def p := proof[q]: [q] *= P0; {I[q]} end").unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));
    }

    #[test]
    fn undeclared_variable() {
        let err = check("def p := proof[q]: [r] *= X; {I[q]} end").unwrap_err();
        assert!(matches!(err, Error::UndeclaredVariable { ref var, .. } if var == "r"));
    }

    #[test]
    fn repeated_variable_rejected() {
        assert!(matches!(
            check("def p := proof[q r]: [q q] *= CX; {I[q]} end"),
            Err(Error::InvalidVars(_))
        ));
    }
}
