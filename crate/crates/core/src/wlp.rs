//! Backward predicate transformers.
//!
//! `wlp` handles every construct, using the annotated invariant for loops;
//! `wp_loopfree` differs only on `abort` and rejects loops.

use std::fmt;

use crate::assertion::Assertion;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Tolerances};
use crate::operator::check_predicate;
use crate::order::{inf_le, prune, OrderDecision, OrderParams, Verdict};
use crate::program::{Measurement, Node, Program};
use crate::register::VarTuple;
use crate::semantics::DEFAULT_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Skip,
    Abort,
    Init,
    Unit,
    Seq,
    NDet,
    Meas,
    While,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One rule application: `{pre} node {post}`.
#[derive(Clone, Debug)]
pub struct TransformStep {
    /// Child-index path of the node from the program root.
    pub path: Vec<usize>,
    pub rule: Rule,
    pub post: Assertion,
    pub pre: Assertion,
    /// Invariant decision, for `While` steps.
    pub invariant_check: Option<OrderDecision>,
}

#[derive(Clone, Debug)]
pub struct WlpResult {
    pub pre: Assertion,
    /// Steps in backward-visit order; the root step is last.
    pub steps: Vec<TransformStep>,
}

impl WlpResult {
    pub fn step(&self, path: &[usize]) -> Option<&TransformStep> {
        self.steps.iter().find(|s| s.path == path)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WlpOptions {
    pub cap: usize,
    pub order: OrderParams,
    pub prune_tol: f64,
    pub tolerances: Tolerances,
}

impl Default for WlpOptions {
    fn default() -> Self {
        WlpOptions {
            cap: DEFAULT_CAP,
            order: OrderParams::default(),
            prune_tol: 1e-9,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Liberal,
    Strict,
}

/// Weakest liberal precondition, with loops handled through their invariants.
pub fn wlp(program: &Program, psi: &Assertion, opts: &WlpOptions) -> Result<WlpResult> {
    let psi = psi.extend(&program.register)?;
    let mut t = Transformer {
        register: &program.register,
        opts,
        flavor: Flavor::Liberal,
        steps: Vec::new(),
    };
    let pre = t.node(&program.root, psi, &mut Vec::new())?;
    Ok(WlpResult { pre, steps: t.steps })
}

/// Weakest precondition of a loop-free program.
pub fn wp_loopfree(program: &Program, psi: &Assertion, opts: &WlpOptions) -> Result<Assertion> {
    Ok(wp_loopfree_steps(program, psi, opts)?.pre)
}

/// [`wp_loopfree`] keeping the rule applications.
pub fn wp_loopfree_steps(program: &Program, psi: &Assertion, opts: &WlpOptions) -> Result<WlpResult> {
    if program.root.contains_loop() {
        return Err(Error::LoopPresent);
    }
    let psi = psi.extend(&program.register)?;
    let mut t = Transformer {
        register: &program.register,
        opts,
        flavor: Flavor::Strict,
        steps: Vec::new(),
    };
    let pre = t.node(&program.root, psi, &mut Vec::new())?;
    Ok(WlpResult { pre, steps: t.steps })
}

/// Decides whether `inv` is an invariant of the loop `node` for postcondition `psi`.
pub fn check_invariant(
    inv: &Assertion,
    node: &Node,
    register: &VarTuple,
    psi: &Assertion,
    opts: &WlpOptions,
) -> Result<OrderDecision> {
    let Node::While { meas, body, .. } = node else {
        return Err(Error::Validation(format!("expected a while loop, found {}", node.kind())));
    };
    let mut t = Transformer {
        register,
        opts,
        flavor: Flavor::Liberal,
        steps: Vec::new(),
    };
    let inv = inv.extend(register)?;
    let phi = t.loop_condition(meas, &psi.extend(register)?, &inv)?;
    let body_pre = t.node(body, phi, &mut vec![0])?;
    inf_le(&inv, &body_pre, &opts.order)
}

/// `{P1·N1·P1 + P0·N0·P0 : N1 ∈ then_pre, N0 ∈ else_pre}`.
pub fn measurement_combine(meas: &Measurement, then_pre: &Assertion, else_pre: &Assertion) -> Result<Assertion> {
    let mut out = Vec::with_capacity(then_pre.len() * else_pre.len());
    for n1 in then_pre.iter() {
        let a = &meas.p1 * n1 * &meas.p1;
        for n0 in else_pre.iter() {
            out.push(linalg::symmetrize(&(&a + &meas.p0 * n0 * &meas.p0)));
        }
    }
    Assertion::new(then_pre.register().clone(), out)
}

struct Transformer<'a> {
    register: &'a VarTuple,
    opts: &'a WlpOptions,
    flavor: Flavor,
    steps: Vec<TransformStep>,
}

impl Transformer<'_> {
    fn cap_check(&self, count: usize, node: &str) -> Result<()> {
        if count > self.opts.cap {
            return Err(Error::SetExplosion {
                node: node.to_string(),
                count,
                cap: self.opts.cap,
            });
        }
        Ok(())
    }

    fn finish(&self, a: Assertion, node: &str) -> Result<Assertion> {
        let a = prune(&a, self.opts.prune_tol);
        self.cap_check(a.len(), node)?;
        for m in a.iter() {
            check_predicate(m, &self.opts.tolerances).map_err(|e| {
                Error::Validation(format!("computed precondition at {node} left [0, I]: {e}"))
            })?;
        }
        Ok(a)
    }

    fn record(&mut self, path: &[usize], rule: Rule, post: &Assertion, pre: &Assertion, check: Option<OrderDecision>) {
        self.steps.push(TransformStep {
            path: path.to_vec(),
            rule,
            post: post.clone(),
            pre: pre.clone(),
            invariant_check: check,
        });
    }

    fn loop_condition(&self, meas: &Measurement, psi: &Assertion, inv: &Assertion) -> Result<Assertion> {
        self.cap_check(psi.len() * inv.len(), "while")?;
        let phi = measurement_combine(meas, inv, psi)?;
        self.finish(phi, "while")
    }

    /// The `if` rule applied to each element of `post` separately: branch
    /// preconditions are only paired when they stem from the same element.
    /// Also returns the unions of the per-element branch preconditions.
    fn branchwise(
        &self,
        meas: &Measurement,
        then_branch: &Node,
        else_branch: &Node,
        post: &Assertion,
    ) -> Result<(Assertion, Assertion, Assertion)> {
        let reg = self.register.clone();
        let mut sub = Transformer {
            register: self.register,
            opts: self.opts,
            flavor: self.flavor,
            steps: Vec::new(),
        };
        let (mut pre, mut ts, mut es) = (Vec::new(), Vec::new(), Vec::new());
        for m in post.iter() {
            let single = Assertion::new(reg.clone(), vec![m.clone()])?;
            let t = sub.node(then_branch, single.clone(), &mut vec![0])?;
            let e = sub.node(else_branch, single, &mut vec![1])?;
            pre.extend(measurement_combine(meas, &t, &e)?.predicates().iter().cloned());
            self.cap_check(pre.len(), "if")?;
            ts.extend(t.predicates().iter().cloned());
            es.extend(e.predicates().iter().cloned());
        }
        Ok((
            Assertion::new(reg.clone(), pre)?,
            Assertion::new(reg.clone(), ts)?,
            Assertion::new(reg, es)?,
        ))
    }

    fn node(&mut self, node: &Node, post: Assertion, path: &mut Vec<usize>) -> Result<Assertion> {
        let d = self.register.dim();
        let (rule, pre, check) = match node {
            Node::Skip => (Rule::Skip, post.clone(), None),
            Node::Abort => {
                let m = match self.flavor {
                    Flavor::Liberal => linalg::identity(d),
                    Flavor::Strict => linalg::zeros(d),
                };
                (Rule::Abort, Assertion::singleton(self.register.clone(), m)?, None)
            }
            Node::Init { channel, .. } => {
                let pre = post.map(|m| linalg::symmetrize(&channel.apply_adjoint_matrix(m)));
                (Rule::Init, self.finish(pre, "init")?, None)
            }
            Node::Unitary { matrix, .. } => {
                let pre = post.map(|m| linalg::symmetrize(&(matrix.adjoint() * m * matrix)));
                (Rule::Unit, self.finish(pre, "unitary")?, None)
            }
            Node::Seq(children) => {
                let mut cur = post.clone();
                for (i, c) in children.iter().enumerate().rev() {
                    path.push(i);
                    cur = self.node(c, cur, path)?;
                    path.pop();
                }
                (Rule::Seq, cur, None)
            }
            Node::NDet(branches) => {
                let mut acc: Option<Assertion> = None;
                for (i, b) in branches.iter().enumerate() {
                    path.push(i);
                    let pre = self.node(b, post.clone(), path)?;
                    path.pop();
                    acc = Some(match acc {
                        None => pre,
                        Some(a) => a.union(&pre)?,
                    });
                    if let Some(a) = &acc {
                        self.cap_check(a.len(), "nondeterministic choice")?;
                    }
                }
                let acc = acc.unwrap_or_else(|| post.clone());
                (Rule::NDet, self.finish(acc, "nondeterministic choice")?, None)
            }
            Node::If {
                meas,
                then_branch,
                else_branch,
            } => {
                path.push(0);
                let t = self.node(then_branch, post.clone(), path)?;
                path.pop();
                path.push(1);
                let e = self.node(else_branch, post.clone(), path)?;
                path.pop();
                let pre = if post.len() == 1 {
                    self.cap_check(t.len() * e.len(), "if")?;
                    measurement_combine(meas, &t, &e)?
                } else {
                    self.branchwise(meas, then_branch, else_branch, &post)?.0
                };
                (Rule::Meas, self.finish(pre, "if")?, None)
            }
            Node::While {
                meas,
                body,
                invariant,
                span,
            } => {
                if self.flavor == Flavor::Strict {
                    return Err(Error::LoopPresent);
                }
                let inv = invariant.as_ref().ok_or(Error::MissingInvariant { span: *span })?;
                let inv_set = inv.assertion.extend(self.register)?;
                let phi = self.loop_condition(meas, &post, &inv_set)?;
                path.push(0);
                let body_pre = self.node(body, phi.clone(), path)?;
                path.pop();
                let decision = inf_le(&inv_set, &body_pre, &self.opts.order)?;
                match decision.verdict {
                    Verdict::Holds => {}
                    Verdict::Fails => {
                        return Err(Error::InvalidInvariant {
                            invariant: inv.text(),
                            span: *span,
                            decision: Box::new(decision),
                        })
                    }
                    Verdict::Inconclusive => {
                        return Err(Error::InvariantUndecided {
                            invariant: inv.text(),
                            span: *span,
                            decision: Box::new(decision),
                        })
                    }
                }
                (Rule::While, phi, Some(decision))
            }
        };
        self.record(path, rule, &post, &pre, check);
        Ok(pre)
    }
}

/// Recomputes one step from its recorded post and the recorded steps of its
/// children; returns whether the recorded pre is reproduced within `tol`.
pub fn recheck_step(
    program: &Program,
    result: &WlpResult,
    step: &TransformStep,
    liberal: bool,
    opts: &WlpOptions,
    tol: f64,
) -> Result<bool> {
    let node = program
        .root
        .at_path(&step.path)
        .ok_or_else(|| Error::Validation(format!("no node at path {:?}", step.path)))?;
    let child = |i: usize| -> Result<&TransformStep> {
        let mut p = step.path.clone();
        p.push(i);
        result
            .step(&p)
            .ok_or_else(|| Error::Validation(format!("missing step for path {p:?}")))
    };
    let reg = &program.register;
    let same = |a: &Assertion, b: &Assertion| a.set_eq(b, tol);
    let fin = |a: Assertion| prune(&a, opts.prune_tol);
    Ok(match node {
        Node::Skip => same(&step.pre, &step.post),
        Node::Abort if liberal => same(&step.pre, &Assertion::identity(reg.clone())),
        Node::Abort => same(&step.pre, &Assertion::zero(reg.clone())),
        Node::Init { channel, .. } => same(
            &step.pre,
            &fin(step.post.map(|m| linalg::symmetrize(&channel.apply_adjoint_matrix(m)))),
        ),
        Node::Unitary { matrix, .. } => same(
            &step.pre,
            &fin(step.post.map(|m| linalg::symmetrize(&(matrix.adjoint() * m * matrix)))),
        ),
        Node::Seq(children) => {
            let n = children.len();
            if n == 0 {
                return Ok(same(&step.pre, &step.post));
            }
            let mut ok = same(&child(n - 1)?.post, &step.post) && same(&child(0)?.pre, &step.pre);
            for i in 0..n - 1 {
                ok &= same(&child(i)?.post, &child(i + 1)?.pre);
            }
            ok
        }
        Node::NDet(branches) => {
            let mut acc: Option<Assertion> = None;
            let mut ok = true;
            for i in 0..branches.len() {
                let c = child(i)?;
                ok &= same(&c.post, &step.post);
                acc = Some(match acc {
                    None => c.pre.clone(),
                    Some(a) => a.union(&c.pre)?,
                });
            }
            ok && acc.is_some_and(|a| same(&step.pre, &fin(a)))
        }
        Node::If {
            meas,
            then_branch,
            else_branch,
        } => {
            let (t, e) = (child(0)?, child(1)?);
            let linked = same(&t.post, &step.post) && same(&e.post, &step.post);
            if step.post.len() == 1 {
                linked && same(&step.pre, &fin(measurement_combine(meas, &t.pre, &e.pre)?))
            } else {
                let sub = Transformer {
                    register: reg,
                    opts,
                    flavor: if liberal { Flavor::Liberal } else { Flavor::Strict },
                    steps: Vec::new(),
                };
                let (pre, ts, es) = sub.branchwise(meas, then_branch, else_branch, &step.post)?;
                linked && same(&fin(ts), &t.pre) && same(&fin(es), &e.pre) && same(&step.pre, &fin(pre))
            }
        }
        Node::While { meas, invariant, .. } => {
            let Some(inv) = invariant else {
                return Ok(false);
            };
            let inv = inv.assertion.extend(reg)?;
            let phi = fin(measurement_combine(meas, &inv, &step.post)?);
            let body = child(0)?;
            same(&step.pre, &phi)
                && same(&body.post, &phi)
                && inf_le(&inv, &body.pre, &opts.order)?.verdict == Verdict::Holds
        }
    })
}

/// `{ℰ†(M) + I − ℰ†(I)}` (liberal) or `{ℰ†(M)}` for explicit channels; the
/// reference sets against which the transformers are tested.
pub fn dual_set(channels: &[&crate::channel::SuperOperator], psi: &Assertion, liberal: bool, prune_tol: f64) -> Result<Assertion> {
    let d = psi.dim();
    let id = linalg::identity(d);
    let mut out: Vec<Mat> = Vec::new();
    for e in channels {
        let slack = if liberal {
            &id - e.apply_adjoint_matrix(&id)
        } else {
            linalg::zeros(d)
        };
        for m in psi.iter() {
            out.push(linalg::symmetrize(&(e.apply_adjoint_matrix(m) + &slack)));
        }
    }
    Ok(prune(&Assertion::new(psi.register().clone(), out)?, prune_tol))
}
