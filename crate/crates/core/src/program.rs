//! Checked program representation: every operator already extended to the
//! proof register.

use crate::assertion::Assertion;
use crate::channel::SuperOperator;
use crate::error::{Error, Result, Span};
use crate::linalg::Mat;
use crate::operator::{check_measurement, extend_matrix};
use crate::register::VarTuple;

/// A user-named predicate term, kept for rendering.
#[derive(Clone, Debug)]
pub struct NamedTerm {
    pub name: String,
    pub vars: VarTuple,
    /// The term extended to the full register.
    pub matrix: Mat,
}

impl NamedTerm {
    pub fn label(&self) -> String {
        format!("{}[{}]", self.name, self.vars)
    }
}

/// An assertion together with the surface terms it came from.
#[derive(Clone, Debug)]
pub struct NamedAssertion {
    pub terms: Vec<NamedTerm>,
    pub assertion: Assertion,
}

impl NamedAssertion {
    pub fn from_terms(register: &VarTuple, terms: Vec<NamedTerm>) -> Result<Self> {
        let assertion = Assertion::new(register.clone(), terms.iter().map(|t| t.matrix.clone()).collect())?;
        Ok(NamedAssertion { terms, assertion })
    }

    pub fn text(&self) -> String {
        let body: Vec<_> = self.terms.iter().map(NamedTerm::label).collect();
        format!("{{ {} }}", body.join(" "))
    }
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub name: String,
    pub vars: VarTuple,
    pub p0: Mat,
    pub p1: Mat,
}

#[derive(Clone, Debug)]
pub enum Node {
    Skip,
    Abort,
    Init {
        vars: VarTuple,
        channel: SuperOperator,
    },
    Unitary {
        vars: VarTuple,
        name: String,
        matrix: Mat,
    },
    Seq(Vec<Node>),
    NDet(Vec<Node>),
    If {
        meas: Measurement,
        then_branch: Box<Node>,
        else_branch: Box<Node>,
    },
    While {
        meas: Measurement,
        body: Box<Node>,
        invariant: Option<NamedAssertion>,
        span: Span,
    },
}

impl Node {
    pub fn contains_loop(&self) -> bool {
        match self {
            Node::While { .. } => true,
            Node::Seq(cs) | Node::NDet(cs) => cs.iter().any(Node::contains_loop),
            Node::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.contains_loop() || else_branch.contains_loop(),
            _ => false,
        }
    }

    /// Child nodes in path order.
    pub fn children(&self) -> Vec<&Node> {
        match self {
            Node::Seq(cs) | Node::NDet(cs) => cs.iter().collect(),
            Node::If {
                then_branch,
                else_branch,
                ..
            } => vec![then_branch, else_branch],
            Node::While { body, .. } => vec![body],
            _ => vec![],
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Node> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at_path(rest)),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Node::Skip => "skip",
            Node::Abort => "abort",
            Node::Init { .. } => "init",
            Node::Unitary { .. } => "unitary",
            Node::Seq(_) => "sequence",
            Node::NDet(_) => "nondeterministic choice",
            Node::If { .. } => "if",
            Node::While { .. } => "while",
        }
    }

    pub fn statement_count(&self) -> usize {
        match self {
            Node::Seq(cs) | Node::NDet(cs) => cs.iter().map(Node::statement_count).sum(),
            Node::If {
                then_branch,
                else_branch,
                ..
            } => 1 + then_branch.statement_count() + else_branch.statement_count(),
            Node::While { body, .. } => 1 + body.statement_count(),
            _ => 1,
        }
    }
}

/// A program over a fixed register.
#[derive(Clone, Debug)]
pub struct Program {
    pub register: VarTuple,
    pub root: Node,
}

/// Convenience constructors used by tests, benches and generators. Local
/// operators are given on `vars` and extended to `register`.
pub struct Builder {
    register: VarTuple,
}

impl Builder {
    pub fn new(register: VarTuple) -> Self {
        Builder { register }
    }

    pub fn register(&self) -> &VarTuple {
        &self.register
    }

    fn tuple(&self, vars: &[&str]) -> Result<VarTuple> {
        let t = VarTuple::new(vars.iter().copied())?;
        if !t.is_subset_of(&self.register) {
            return Err(Error::Extension {
                from: t.to_string(),
                to: self.register.to_string(),
            });
        }
        Ok(t)
    }

    pub fn init(&self, vars: &[&str]) -> Result<Node> {
        let vars = self.tuple(vars)?;
        let channel = SuperOperator::set_zero(vars.clone()).extend(&self.register)?;
        Ok(Node::Init { vars, channel })
    }

    pub fn unitary(&self, vars: &[&str], name: &str, local: &Mat) -> Result<Node> {
        let vars = self.tuple(vars)?;
        let matrix = extend_matrix(local, &vars, &self.register)?;
        Ok(Node::Unitary {
            vars,
            name: name.to_string(),
            matrix,
        })
    }

    pub fn measurement(&self, name: &str, vars: &[&str], p0: &Mat, p1: &Mat) -> Result<Measurement> {
        let vars = self.tuple(vars)?;
        check_measurement(p0, p1, &Default::default())?;
        Ok(Measurement {
            name: name.to_string(),
            p0: extend_matrix(p0, &vars, &self.register)?,
            p1: extend_matrix(p1, &vars, &self.register)?,
            vars,
        })
    }

    pub fn if_(&self, meas: Measurement, then_branch: Node, else_branch: Node) -> Node {
        Node::If {
            meas,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        }
    }

    pub fn while_(&self, meas: Measurement, body: Node, invariant: Option<NamedAssertion>) -> Node {
        Node::While {
            meas,
            body: Box::new(body),
            invariant,
            span: Span::default(),
        }
    }

    /// Named invariant term on `vars`.
    pub fn term(&self, name: &str, vars: &[&str], local: &Mat) -> Result<NamedTerm> {
        let vars = self.tuple(vars)?;
        Ok(NamedTerm {
            name: name.to_string(),
            matrix: extend_matrix(local, &vars, &self.register)?,
            vars,
        })
    }

    pub fn program(&self, root: Node) -> Program {
        Program {
            register: self.register.clone(),
            root,
        }
    }
}

/// Sequential composition with nested sequences flattened.
pub fn seq(nodes: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for n in nodes {
        match n {
            Node::Seq(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        flat.pop().unwrap()
    } else {
        Node::Seq(flat)
    }
}

/// Nondeterministic choice with nested choices flattened.
pub fn ndet(nodes: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for n in nodes {
        match n {
            Node::NDet(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        flat.pop().unwrap()
    } else {
        Node::NDet(flat)
    }
}
