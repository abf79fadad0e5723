//! Fixtures shared by the benchmarks.

use nqverify::corpus::{example, run_example};
use nqverify::generate::{random_assertion, random_loopfree, register, ProgramShape};
use nqverify::program::Program;
use nqverify::{Assertion, VerifyOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A pair of random assertions on `qubits` qubits with `m` and `k` elements.
pub fn order_instance(seed: u64, qubits: usize, m: usize, k: usize) -> (Assertion, Assertion) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reg = register(qubits);
    let theta = random_assertion(&mut rng, &reg, m);
    let psi = random_assertion(&mut rng, &reg, k);
    (theta, psi)
}

pub fn loopfree_instance(seed: u64, shape: &ProgramShape) -> (Program, Assertion) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_loopfree(&mut rng, shape);
    let psi = random_assertion(&mut rng, &p.register, 2);
    (p, psi)
}

/// The walk program and its postcondition from the bundled examples.
pub fn walk() -> (Program, Assertion) {
    let r = run_example(example("qwalk").expect("bundled example"), &VerifyOptions::default()).expect("walk verifies");
    let proof = r.proof("pf").expect("proof pf");
    (proof.checked.program.clone(), proof.checked.post.assertion.clone())
}
