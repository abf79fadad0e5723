//! Lifted denotational semantics: programs denote finite sets of channels.
//!
//! Loops are approximated by bounded unrolling over every scheduler prefix.
//! The empirical checker built on top of it can refute a correctness formula
//! but never proves one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assertion::Assertion;
use crate::channel::{compose, sum, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, c, Mat, Vector};
use crate::program::{Node, Program};
use crate::register::VarTuple;

pub use crate::assertion::expectation;

pub const DEFAULT_CAP: usize = 4096;
/// Entrywise tolerance on transfer matrices for channel deduplication.
pub const CHANNEL_EQ_TOL: f64 = 1e-10;

/// Branch indices consumed in execution order.
pub type Scheduler = Vec<usize>;

#[derive(Clone, Debug)]
pub struct Element {
    pub channel: SuperOperator,
    pub scheduler: Scheduler,
}

#[derive(Clone, Debug)]
pub struct SemanticsSet {
    pub register: VarTuple,
    pub elements: Vec<Element>,
    /// Set when the cap was hit and elements were dropped.
    pub truncated: bool,
}

impl SemanticsSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn channels(&self) -> impl Iterator<Item = &SuperOperator> {
        self.elements.iter().map(|e| &e.channel)
    }

    /// Images of a state under every element.
    pub fn apply(&self, rho: &Mat) -> Vec<Mat> {
        self.channels().map(|e| e.apply_matrix(rho)).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SemanticsOptions {
    pub cap: usize,
    /// Keep the first `cap` elements instead of failing.
    pub truncate: bool,
}

impl Default for SemanticsOptions {
    fn default() -> Self {
        SemanticsOptions {
            cap: DEFAULT_CAP,
            truncate: false,
        }
    }
}

struct SetBuilder<'a> {
    register: &'a VarTuple,
    opts: &'a SemanticsOptions,
    node: &'static str,
    elements: Vec<Element>,
    transfers: Vec<Mat>,
    truncated: bool,
}

impl<'a> SetBuilder<'a> {
    fn new(register: &'a VarTuple, opts: &'a SemanticsOptions, node: &'static str) -> Self {
        SetBuilder {
            register,
            opts,
            node,
            elements: Vec::new(),
            transfers: Vec::new(),
            truncated: false,
        }
    }

    fn push(&mut self, channel: SuperOperator, scheduler: Scheduler) -> Result<()> {
        let t = channel.transfer_matrix();
        if self
            .transfers
            .iter()
            .any(|u| linalg::max_abs_diff(u, &t) <= CHANNEL_EQ_TOL)
        {
            return Ok(());
        }
        if self.elements.len() >= self.opts.cap {
            if self.opts.truncate {
                self.truncated = true;
                return Ok(());
            }
            return Err(Error::SetExplosion {
                node: self.node.to_string(),
                count: self.elements.len() + 1,
                cap: self.opts.cap,
            });
        }
        self.transfers.push(t);
        self.elements.push(Element { channel, scheduler });
        Ok(())
    }

    /// Fails early when a product of `count` candidates cannot fit.
    fn expect(&self, count: usize) -> Result<()> {
        if count > self.opts.cap && !self.opts.truncate {
            return Err(Error::SetExplosion {
                node: self.node.to_string(),
                count,
                cap: self.opts.cap,
            });
        }
        Ok(())
    }

    fn full(&self) -> bool {
        self.truncated
    }

    fn finish(self, inherited: bool) -> SemanticsSet {
        SemanticsSet {
            register: self.register.clone(),
            elements: self.elements,
            truncated: self.truncated || inherited,
        }
    }
}

/// Exact semantics of a loop-free program.
pub fn denote_loopfree(program: &Program) -> Result<SemanticsSet> {
    denote_loopfree_with(program, &SemanticsOptions::default())
}

pub fn denote_loopfree_with(program: &Program, opts: &SemanticsOptions) -> Result<SemanticsSet> {
    if program.root.contains_loop() {
        return Err(Error::LoopPresent);
    }
    denote_node(&program.root, &program.register, 0, opts)
}

/// Semantics with every loop replaced by its `depth`-step unrolling.
pub fn denote_bounded(program: &Program, depth: usize, opts: &SemanticsOptions) -> Result<SemanticsSet> {
    denote_node(&program.root, &program.register, depth, opts)
}

fn singleton(register: &VarTuple, channel: SuperOperator) -> SemanticsSet {
    SemanticsSet {
        register: register.clone(),
        elements: vec![Element {
            channel,
            scheduler: vec![],
        }],
        truncated: false,
    }
}

fn concat(a: &[usize], b: &[usize]) -> Scheduler {
    a.iter().chain(b).copied().collect()
}

pub fn denote_node(node: &Node, register: &VarTuple, depth: usize, opts: &SemanticsOptions) -> Result<SemanticsSet> {
    Ok(match node {
        Node::Skip => singleton(register, SuperOperator::identity(register.clone())),
        Node::Abort => singleton(register, SuperOperator::zero(register.clone())),
        Node::Init { channel, .. } => singleton(register, channel.clone()),
        Node::Unitary { matrix, .. } => singleton(register, SuperOperator::unitary(register.clone(), matrix.clone())?),
        Node::Seq(children) => {
            let mut acc = singleton(register, SuperOperator::identity(register.clone()));
            for child in children {
                let next = denote_node(child, register, depth, opts)?;
                let mut b = SetBuilder::new(register, opts, "sequence");
                b.expect(acc.len() * next.len())?;
                'outer: for a in &acc.elements {
                    for e in &next.elements {
                        if b.full() {
                            break 'outer;
                        }
                        b.push(compose(&e.channel, &a.channel)?, concat(&a.scheduler, &e.scheduler))?;
                    }
                }
                acc = b.finish(acc.truncated || next.truncated);
            }
            acc
        }
        Node::NDet(branches) => {
            let mut b = SetBuilder::new(register, opts, "nondeterministic choice");
            let mut inherited = false;
            for (i, br) in branches.iter().enumerate() {
                let set = denote_node(br, register, depth, opts)?;
                inherited |= set.truncated;
                for e in set.elements {
                    b.push(e.channel, concat(&[i], &e.scheduler))?;
                }
            }
            b.finish(inherited)
        }
        Node::If {
            meas,
            then_branch,
            else_branch,
        } => {
            let p0 = SuperOperator::projection(register.clone(), meas.p0.clone())?;
            let p1 = SuperOperator::projection(register.clone(), meas.p1.clone())?;
            let s1 = denote_node(then_branch, register, depth, opts)?;
            let s0 = denote_node(else_branch, register, depth, opts)?;
            let mut b = SetBuilder::new(register, opts, "if");
            b.expect(s1.len() * s0.len())?;
            'outer: for e1 in &s1.elements {
                let left = compose(&e1.channel, &p1)?;
                for e0 in &s0.elements {
                    if b.full() {
                        break 'outer;
                    }
                    let ch = sum(&left, &compose(&e0.channel, &p0)?)?;
                    b.push(ch, concat(&e1.scheduler, &e0.scheduler))?;
                }
            }
            b.finish(s1.truncated || s0.truncated)
        }
        Node::While { meas, body, .. } => {
            let p0 = SuperOperator::projection(register.clone(), meas.p0.clone())?;
            let p1 = SuperOperator::projection(register.clone(), meas.p1.clone())?;
            let inner = denote_node(body, register, depth, opts)?;
            let mut b = SetBuilder::new(register, opts, "while");
            let total = inner.len().checked_pow(depth as u32).unwrap_or(usize::MAX);
            b.expect(total)?;
            let start = SuperOperator::identity(register.clone());
            unroll_all(&p0, &p1, &inner, depth, &start, &p0, &mut Vec::new(), &mut b)?;
            b.finish(inner.truncated)
        }
    })
}

/// Depth-first enumeration of `F_n^η` sharing common scheduler prefixes.
#[allow(clippy::too_many_arguments)]
fn unroll_all(
    p0: &SuperOperator,
    p1: &SuperOperator,
    body: &SemanticsSet,
    remaining: usize,
    prefix: &SuperOperator,
    acc: &SuperOperator,
    sched: &mut Scheduler,
    out: &mut SetBuilder<'_>,
) -> Result<()> {
    if out.full() {
        return Ok(());
    }
    if remaining == 0 {
        return out.push(acc.clone(), sched.clone());
    }
    for eta in &body.elements {
        let next = compose(&eta.channel, &compose(p1, prefix)?)?;
        let next_acc = sum(acc, &compose(p0, &next)?)?;
        let mark = sched.len();
        sched.extend(&eta.scheduler);
        unroll_all(p0, p1, body, remaining - 1, &next, &next_acc, sched, out)?;
        sched.truncate(mark);
    }
    Ok(())
}

/// `F_n^η = Σ_{i=0}^{n} 𝒫⁰∘η_i∘𝒫¹∘…∘η_1∘𝒫¹` for the scheduler prefix `etas = [η_1, …, η_n]`.
pub fn unroll(p0: &SuperOperator, p1: &SuperOperator, etas: &[&SuperOperator]) -> Result<SuperOperator> {
    let mut prefix = SuperOperator::identity(p0.vars().clone());
    let mut acc = p0.clone();
    for eta in etas {
        prefix = compose(eta, &compose(p1, &prefix)?)?;
        acc = sum(&acc, &compose(p0, &prefix)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Partial,
    Total,
}

#[derive(Clone, Copy, Debug)]
pub struct EmpiricalOptions {
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub tol: f64,
    pub semantics: SemanticsOptions,
}

impl Default for EmpiricalOptions {
    fn default() -> Self {
        EmpiricalOptions {
            samples: 200,
            depth: 4,
            seed: 7,
            tol: 1e-7,
            semantics: SemanticsOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub sample: usize,
    pub element: usize,
    pub rho: Mat,
    pub sigma: Mat,
    /// Amount by which the precondition side exceeds the postcondition side.
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub enum EmpiricalVerdict {
    NoCounterexample {
        samples: usize,
        channels: usize,
        truncated: bool,
    },
    Counterexample(Counterexample),
}

impl EmpiricalVerdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, EmpiricalVerdict::Counterexample(_))
    }
}

/// Violation `Exp(ρ⊨Θ) − Exp(σ⊨Ψ) [− tr ρ + tr σ]` for one state pair.
pub fn formula_gap(pre: &Assertion, post: &Assertion, rho: &Mat, sigma: &Mat, mode: Mode) -> f64 {
    let lhs = pre.expectation_matrix(rho);
    let mut rhs = post.expectation_matrix(sigma);
    if mode == Mode::Partial {
        rhs += linalg::trace(rho).re - linalg::trace(sigma).re;
    }
    lhs - rhs
}

/// Searches sampled inputs for a violation of `{pre} program {post}`.
pub fn check_formula_empirical(
    pre: &Assertion,
    program: &Program,
    post: &Assertion,
    mode: Mode,
    opts: &EmpiricalOptions,
) -> Result<EmpiricalVerdict> {
    let reg = &program.register;
    let pre = pre.extend(reg)?;
    let post = post.extend(reg)?;
    let set = denote_bounded(program, opts.depth, &opts.semantics)?;
    let states = sample_states(reg.dim(), opts.samples, opts.seed);
    for (si, rho) in states.iter().enumerate() {
        for (ei, e) in set.elements.iter().enumerate() {
            let sigma = e.channel.apply_matrix(rho);
            let margin = formula_gap(&pre, &post, rho, &sigma, mode);
            if margin > opts.tol {
                return Ok(EmpiricalVerdict::Counterexample(Counterexample {
                    sample: si,
                    element: ei,
                    rho: rho.clone(),
                    sigma,
                    margin,
                }));
            }
        }
    }
    Ok(EmpiricalVerdict::NoCounterexample {
        samples: states.len(),
        channels: set.len(),
        truncated: set.truncated,
    })
}

fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> Vector {
    let v = Vector::from_fn(d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v.unscale(n)
}

/// Deterministic list of partial density operators: basis states, the
/// maximally mixed state and `|+…+⟩` first, then random mixtures of
/// Haar-like pure states scaled to a random trace in (0, 1].
pub fn sample_states(d: usize, count: usize, seed: u64) -> Vec<Mat> {
    let mut out = Vec::with_capacity(count);
    for i in 0..d {
        out.push(linalg::matrix_unit(d, i, i));
    }
    out.push(linalg::identity(d).unscale(d as f64));
    out.push(Mat::from_element(d, d, c(1.0 / d as f64, 0.0)));
    out.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let rank = rng.random_range(1..=d.min(4));
        let weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        let scale = 1.0 - rng.random::<f64>();
        let mut rho = linalg::zeros(d);
        for w in weights {
            rho += linalg::outer(&random_pure(d, &mut rng)).scale(w / total * scale);
        }
        out.push(rho);
    }
    out
}
