//! Seeded random programs, unitaries and predicates for testing and benchmarks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assertion::Assertion;
use crate::channel::SuperOperator;
use crate::gates;
use crate::linalg::{self, c, Mat};
use crate::operator::extend_matrix;
use crate::program::{ndet, seq, Builder, Node, Program};
use crate::register::VarTuple;

#[derive(Clone, Copy, Debug)]
pub struct ProgramShape {
    pub max_qubits: usize,
    /// Bound on [`Node::statement_count`].
    pub max_statements: usize,
    pub max_ndet: usize,
    pub allow_abort: bool,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            max_qubits: 3,
            max_statements: 6,
            max_ndet: 2,
            allow_abort: true,
        }
    }
}

pub fn register(n: usize) -> VarTuple {
    VarTuple::new((0..n).map(|i| format!("q{i}"))).expect("distinct names")
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    let qr = gaussian(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `V diag(u) V†` with a Haar `V`; eigenvalues are uniform in [0, 1], with a
/// few pinned to 0 or 1 now and then.
pub fn random_predicate(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    let v = random_unitary(rng, d);
    let mut diag = linalg::zeros(d);
    for i in 0..d {
        let roll: f64 = rng.random();
        let u = if roll < 0.1 {
            0.0
        } else if roll < 0.2 {
            1.0
        } else {
            rng.random()
        };
        diag[(i, i)] = c(u, 0.0);
    }
    linalg::symmetrize(&(&v * diag * v.adjoint()))
}

/// Random trace-preserving channel on `vars` with `k` Kraus operators, cut
/// from a Haar isometry.
pub fn random_channel(rng: &mut ChaCha8Rng, vars: &VarTuple, k: usize) -> SuperOperator {
    let d = vars.dim();
    let u = random_unitary(rng, d * k);
    let kraus = (0..k).map(|i| u.view((i * d, 0), (d, d)).into_owned()).collect();
    SuperOperator::from_kraus_unchecked(vars.clone(), kraus).expect("square Kraus operators")
}

/// Random density operator of unit trace and the given rank.
pub fn random_state(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> Mat {
    let g = gaussian(rng, d, rank);
    let rho = &g * g.adjoint();
    let t = linalg::trace(&rho).re;
    rho.unscale(t)
}

pub fn random_assertion(rng: &mut ChaCha8Rng, register: &VarTuple, size: usize) -> Assertion {
    let d = register.dim();
    let ms = (0..size).map(|_| random_predicate(rng, d)).collect();
    Assertion::new(register.clone(), ms).expect("predicates on the register")
}

/// Random loop-free program over `q0 … q{n-1}` within `shape`.
pub fn random_loopfree(rng: &mut ChaCha8Rng, shape: &ProgramShape) -> Program {
    let n = rng.random_range(1..=shape.max_qubits);
    let b = Builder::new(register(n));
    loop {
        let budget = rng.random_range(1..=shape.max_statements);
        let mut ndets = shape.max_ndet;
        let root = gen_node(rng, &b, budget, &mut ndets, shape);
        if root.statement_count() <= shape.max_statements {
            return b.program(root);
        }
    }
}

fn pick_vars(rng: &mut ChaCha8Rng, reg: &VarTuple, k: usize) -> Vec<String> {
    let mut names: Vec<String> = reg.names().to_vec();
    let mut out = Vec::new();
    for _ in 0..k {
        let i = rng.random_range(0..names.len());
        out.push(names.remove(i));
    }
    out
}

fn atom(rng: &mut ChaCha8Rng, b: &Builder, shape: &ProgramShape) -> Node {
    let reg = b.register().clone();
    let n = reg.len();
    let roll = rng.random_range(0..20);
    match roll {
        0 => Node::Skip,
        1 if shape.allow_abort => Node::Abort,
        2 | 3 => {
            let k = rng.random_range(1..=n);
            let vars = pick_vars(rng, &reg, k);
            let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
            b.init(&vars).expect("vars in register")
        }
        4..=7 if n >= 2 => {
            let vars = pick_vars(rng, &reg, 2);
            let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
            if rng.random_bool(0.5) {
                b.unitary(&vars, "CX", &gates::cx()).expect("two qubits")
            } else {
                b.unitary(&vars, "U2", &random_unitary(rng, 4)).expect("two qubits")
            }
        }
        _ => {
            let vars = pick_vars(rng, &reg, 1);
            let (name, u) = match rng.random_range(0..5) {
                0 => ("X", gates::x()),
                1 => ("H", gates::h()),
                2 => ("Z", gates::z()),
                3 => ("Y", gates::y()),
                _ => ("U1", random_unitary(rng, 2)),
            };
            b.unitary(&[vars[0].as_str()], name, &u).expect("one qubit")
        }
    }
}

/// Computational or randomly rotated measurement of one qubit.
fn random_measurement(rng: &mut ChaCha8Rng, b: &Builder) -> crate::program::Measurement {
    let vars = pick_vars(rng, b.register(), 1);
    let (name, p0, p1) = if rng.random_bool(0.5) {
        ("M01", gates::p0(), gates::p1())
    } else {
        let u = random_unitary(rng, 2);
        let ud = u.adjoint();
        ("MU", &u * gates::p0() * &ud, &u * gates::p1() * &ud)
    };
    b.measurement(name, &[vars[0].as_str()], &p0, &p1).expect("valid measurement")
}

fn gen_node(rng: &mut ChaCha8Rng, b: &Builder, budget: usize, ndets: &mut usize, shape: &ProgramShape) -> Node {
    if budget <= 1 {
        return atom(rng, b, shape);
    }
    let roll = rng.random_range(0..10);
    if roll < 2 && *ndets > 0 {
        *ndets -= 1;
        let left = rng.random_range(1..budget);
        let l = gen_node(rng, b, left, ndets, shape);
        let r = gen_node(rng, b, budget - left, ndets, shape);
        return ndet(vec![l, r]);
    }
    if roll < 4 && budget >= 3 {
        let inner = budget - 1;
        let left = rng.random_range(1..inner);
        let meas = random_measurement(rng, b);
        let l = gen_node(rng, b, left, ndets, shape);
        let r = gen_node(rng, b, inner - left, ndets, shape);
        return b.if_(meas, l, r);
    }
    let first = rng.random_range(1..budget);
    let l = gen_node(rng, b, first, ndets, shape);
    let r = gen_node(rng, b, budget - first, ndets, shape);
    seq(vec![l, r])
}

/// Number of nondeterministic choice nodes.
pub fn ndet_count(node: &Node) -> usize {
    let own = usize::from(matches!(node, Node::NDet(_)));
    own + node.children().into_iter().map(ndet_count).sum::<usize>()
}

/// `P` extended from a local qubit to the full register.
pub fn local_predicate(local: &Mat, vars: &[&str], register: &VarTuple) -> Mat {
    extend_matrix(local, &VarTuple::of(vars), register).expect("vars in register")
}
