//! Recursive-descent parser for declaration files.
//!
//! ```text
//! file      := { decl } ;
//! decl      := "def" ID ":=" ( "load" STRING | proof ) "end" | "show" ID "end" ;
//! proof     := "proof" "[" ids "]" ":" [ assertion ";" ] stmts ";" assertion ;
//! stmts     := stmt { ";" stmt } ;
//! stmt      := "skip" | "abort" | "[" ids "]" ":=" "0" | "[" ids "]" "*=" ID
//!            | "(" stmts { "#" stmts } ")"
//!            | "if" ID "[" ids "]" "then" stmts [ "else" stmts ] "end"
//!            | [ inv ] "while" ID "[" ids "]" "do" stmts "end" ;
//! inv       := "{" "inv" ":" terms "}" ";" ;
//! assertion := "{" terms "}" ;
//! terms     := term { term } ;   term := ID "[" ids "]" ;
//! ```

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Result, Span};

pub const KEYWORDS: &[&str] = &[
    "def", "load", "end", "proof", "skip", "abort", "show", "while", "do", "inv", "if", "then",
    "else",
];

pub fn parse(source: &str) -> Result<DeclarationFile> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(DeclarationFile { decls })
}

/// Parses a standalone statement sequence (used by tests and tooling).
pub fn parse_stmts(source: &str) -> Result<Stmt> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let s = p.stmts(false)?;
    p.expect_eof()?;
    Ok(s)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            span: self.span(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.to_string())
        }
    }

    fn expect_eof(&mut self) -> Result<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn ident(&mut self) -> Result<(String, Span)> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.error("an identifier"),
        }
    }

    fn decl(&mut self) -> Result<Decl> {
        if self.is_kw("show") {
            let span = self.bump().span;
            let (name, _) = self.ident()?;
            self.expect_kw("end")?;
            return Ok(Decl::Show { name, span });
        }
        if !self.is_kw("def") {
            return self.error("`def` or `show`");
        }
        let span = self.bump().span;
        let (name, _) = self.ident()?;
        self.expect(Tok::ColonEq)?;
        let decl = if self.is_kw("load") {
            self.bump();
            let path = match self.peek() {
                Tok::Str(s) => s.clone(),
                _ => return self.error("a string literal"),
            };
            self.bump();
            Decl::Load { name, path, span }
        } else if self.is_kw("proof") {
            let proof = self.proof()?;
            Decl::Proof { name, proof, span }
        } else {
            return self.error("`load` or `proof`");
        };
        self.expect_kw("end")?;
        Ok(decl)
    }

    fn proof(&mut self) -> Result<ProofDecl> {
        self.expect_kw("proof")?;
        let register = self.bracketed_ids()?;
        self.expect(Tok::Colon)?;
        let pre = if self.at_plain_assertion() {
            let a = self.assertion()?;
            self.expect(Tok::Semi)?;
            Some(a)
        } else {
            None
        };
        let body = self.stmts(true)?;
        self.expect(Tok::Semi)?;
        if !self.at_plain_assertion() {
            return self.error("a postcondition `{ ... }`");
        }
        let post = self.assertion()?;
        Ok(ProofDecl {
            register,
            pre,
            body,
            post,
        })
    }

    /// `{` that opens an assertion rather than an invariant annotation.
    fn at_plain_assertion(&self) -> bool {
        self.peek() == &Tok::LBrace && !matches!(self.peek_at(1), Tok::Ident(s) if s == "inv")
    }

    fn at_block_end(&self) -> bool {
        matches!(self.peek(), Tok::RParen | Tok::Hash | Tok::Eof) || self.is_kw("end") || self.is_kw("else")
    }

    fn stmts(&mut self, top_level: bool) -> Result<Stmt> {
        let mut items = vec![self.stmt()?];
        while self.peek() == &Tok::Semi {
            if top_level && self.peek_at(1) == &Tok::LBrace
                && !matches!(self.peek_at(2), Tok::Ident(s) if s == "inv")
            {
                break;
            }
            self.bump();
            if !top_level && self.at_block_end() {
                break;
            }
            items.push(self.stmt()?);
        }
        Ok(Stmt::seq(items))
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "skip" => {
                self.bump();
                Ok(Stmt::Skip(span))
            }
            Tok::Ident(kw) if kw == "abort" => {
                self.bump();
                Ok(Stmt::Abort(span))
            }
            Tok::LBracket => {
                let vars = self.bracketed_ids()?;
                match self.peek() {
                    Tok::ColonEq => {
                        self.bump();
                        match self.peek() {
                            Tok::Num(n) if n == "0" => {
                                self.bump();
                                Ok(Stmt::Init { vars, span })
                            }
                            _ => self.error("`0`"),
                        }
                    }
                    Tok::StarEq => {
                        self.bump();
                        let (op, _) = self.ident()?;
                        Ok(Stmt::Unitary { vars, op, span })
                    }
                    _ => self.error("`:=0` or `*=`"),
                }
            }
            Tok::LParen => {
                self.bump();
                let mut branches = vec![self.stmts(false)?];
                while self.peek() == &Tok::Hash {
                    self.bump();
                    branches.push(self.stmts(false)?);
                }
                self.expect(Tok::RParen)?;
                Ok(Stmt::ndet(branches, span))
            }
            Tok::Ident(kw) if kw == "if" => {
                self.bump();
                let (meas, _) = self.ident()?;
                let vars = self.bracketed_ids()?;
                self.expect_kw("then")?;
                let then_branch = self.stmts(false)?;
                let else_branch = if self.is_kw("else") {
                    self.bump();
                    self.stmts(false)?
                } else {
                    Stmt::Skip(self.span())
                };
                self.expect_kw("end")?;
                Ok(Stmt::If {
                    meas,
                    vars,
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                    span,
                })
            }
            Tok::LBrace => {
                self.bump();
                self.expect_kw("inv")?;
                self.expect(Tok::Colon)?;
                let terms = self.terms()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Semi)?;
                if !self.is_kw("while") {
                    return self.error("`while` after an invariant annotation");
                }
                self.while_loop(Some(AssertionExpr { terms, span }))
            }
            Tok::Ident(kw) if kw == "while" => self.while_loop(None),
            _ => self.error("a statement (`skip`, `abort`, `[`, `(`, `if`, `while` or `{ inv: ... }`)"),
        }
    }

    fn while_loop(&mut self, invariant: Option<AssertionExpr>) -> Result<Stmt> {
        let span = self.expect_kw("while")?;
        let (meas, _) = self.ident()?;
        let vars = self.bracketed_ids()?;
        self.expect_kw("do")?;
        let body = self.stmts(false)?;
        self.expect_kw("end")?;
        Ok(Stmt::While {
            meas,
            vars,
            body: Box::new(body),
            invariant,
            span,
        })
    }

    fn bracketed_ids(&mut self) -> Result<Vec<String>> {
        self.expect(Tok::LBracket)?;
        let mut ids = vec![self.ident()?.0];
        while matches!(self.peek(), Tok::Ident(_)) {
            ids.push(self.ident()?.0);
        }
        self.expect(Tok::RBracket)?;
        Ok(ids)
    }

    fn assertion(&mut self) -> Result<AssertionExpr> {
        let span = self.expect(Tok::LBrace)?;
        let terms = self.terms()?;
        self.expect(Tok::RBrace)?;
        Ok(AssertionExpr { terms, span })
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        let mut terms = vec![self.term()?];
        while matches!(self.peek(), Tok::Ident(_)) {
            terms.push(self.term()?);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let (name, span) = self.ident()?;
        let vars = self.bracketed_ids()?;
        Ok(Term { name, vars, span })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const QWALK: &str = r#"
def invN := load "invN.npy" end
// more operators imported ...
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

    #[test]
    fn quantum_walk_listing() {
        let f = parse(QWALK).unwrap();
        assert_eq!(f.decls.len(), 3);
        assert!(matches!(&f.decls[0], Decl::Load { name, path, .. } if name == "invN" && path == "invN.npy"));
        assert!(matches!(&f.decls[2], Decl::Show { name, .. } if name == "pf"));
        let Decl::Proof { proof, .. } = &f.decls[1] else {
            panic!("expected proof")
        };
        assert_eq!(proof.register, vec!["q1", "q2"]);
        assert_eq!(proof.pre.as_ref().unwrap().terms[0].name, "I");
        assert_eq!(proof.post.terms[0].name, "Zero");
        let Stmt::Seq(items) = &proof.body else {
            panic!("expected sequence")
        };
        assert!(matches!(&items[0], Stmt::Init { .. }));
        let Stmt::While { invariant, body, .. } = &items[1] else {
            panic!("expected while")
        };
        assert_eq!(invariant.as_ref().unwrap().terms[0].name, "invN");
        assert!(matches!(body.as_ref(), Stmt::NDet(b, _) if b.len() == 2));
    }

    #[test]
    fn skip_proof() {
        let f = parse("def p := proof[q]: {I[q]}; skip; {I[q]} end").unwrap();
        let Decl::Proof { proof, .. } = &f.decls[0] else {
            panic!()
        };
        assert!(matches!(proof.body, Stmt::Skip(_)));
    }

    #[test]
    fn ndet_flattening() {
        let a = parse_stmts("( skip # abort # [q] :=0 )").unwrap();
        assert!(matches!(&a, Stmt::NDet(b, _) if b.len() == 3));
        let left = parse_stmts("( ( skip # abort ) # [q] :=0 )").unwrap();
        let right = parse_stmts("( skip # ( abort # [q] :=0 ) )").unwrap();
        assert_eq!(left, right);
        assert_eq!(left, a);
    }

    #[test]
    fn box_alias_parses() {
        let a = parse_stmts("( skip □ [q] *= X )").unwrap();
        assert_eq!(a, parse_stmts("( skip # [q] *= X )").unwrap());
    }

    #[test]
    fn if_without_else_expands_to_skip() {
        let a = parse_stmts("if M01[q] then [q] *= X end").unwrap();
        let b = parse_stmts("if M01[q] then [q] *= X else skip end").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_precondition_allowed() {
        let f = parse("def p := proof[q]: [q] *= H; {Pp[q]} end").unwrap();
        let Decl::Proof { proof, .. } = &f.decls[0] else {
            panic!()
        };
        assert!(proof.pre.is_none());
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse("def p := proof[q]:\n  {I[q]};\n  [q] *= ;\n {I[q]} end").unwrap_err();
        match err {
            Error::Syntax { span, expected, .. } => {
                assert_eq!((span.line, span.col), (3, 10));
                assert!(expected.contains("identifier"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn keyword_is_not_an_identifier() {
        assert!(parse("def end := load \"x\" end").is_err());
    }

    #[test]
    fn multi_term_invariant() {
        let s = parse_stmts("{ inv: A[q] B[q r] }; while M01[q] do skip end").unwrap();
        let Stmt::While { invariant, .. } = s else { panic!() };
        assert_eq!(invariant.unwrap().terms.len(), 2);
    }
}
