use nqverify::generate::{random_assertion, random_channel, random_predicate, register};
use nqverify::gates;
use nqverify::linalg::{self, lambda_max, Mat};
use nqverify::order::margin_of;
use nqverify::semantics::sample_states;
use nqverify::{inf_le, prune, Assertion, Certificate, OrderParams, Verdict, VarTuple};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> OrderParams {
    OrderParams::default()
}

/// Random pair of assertions on 1 or 2 qubits with at most three elements each;
/// half of the time Θ is built to lie below Ψ.
fn instance(seed: u64) -> (Assertion, Assertion) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reg = register(rng.random_range(1..=2));
    let size = rng.random_range(1..=3);
    let psi = random_assertion(&mut rng, &reg, size);
    let theta = if rng.random_bool(0.5) {
        let shrink: f64 = rng.random_range(0.3..1.0);
        let mut ms: Vec<Mat> = psi.iter().map(|m| m.scale(shrink)).collect();
        ms.truncate(rng.random_range(1..=ms.len()));
        ms.push(random_predicate(&mut rng, reg.dim()));
        Assertion::new(reg, ms).unwrap()
    } else {
        let size = rng.random_range(1..=3);
        random_assertion(&mut rng, &reg, size)
    };
    (theta, psi)
}

/// Largest sampled value of `min_j tr(M_j ρ) − tr(N ρ)` over targets `N`.
fn sampled_violation(theta: &Assertion, psi: &Assertion, seed: u64) -> f64 {
    let d = theta.dim();
    sample_states(d, 1000, seed)
        .iter()
        .map(|rho| {
            let rho = rho.unscale(linalg::trace(rho).re);
            let lhs = theta.expectation_matrix(&rho);
            psi.iter()
                .map(|n| lhs - linalg::trace_product(n, &rho).re)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificates_check_out_independently(seed in any::<u64>()) {
        let (theta, psi) = instance(seed);
        let d = inf_le(&theta, &psi, &params()).unwrap();
        for t in &d.targets {
            let n = &psi.predicates()[t.target];
            match &t.certificate {
                Certificate::Holds { lambda, .. } => {
                    let mut h = -n.clone();
                    for (m, l) in theta.iter().zip(lambda) {
                        h += m.scale(*l);
                    }
                    prop_assert!(lambda_max(&h) <= params().tol_accept);
                    prop_assert!(((lambda.iter().sum::<f64>()) - 1.0).abs() < 1e-12);
                }
                Certificate::Fails { witness, margin } => {
                    let v = witness;
                    let direct = theta
                        .iter()
                        .map(|m| (v.adjoint() * (m - n) * v)[(0, 0)].re)
                        .fold(f64::INFINITY, f64::min);
                    prop_assert!(direct > params().tol_accept);
                    prop_assert!((direct - margin).abs() < 1e-9);
                    prop_assert!((margin_of(theta.predicates(), n, v) - direct).abs() < 1e-12);
                }
                Certificate::Inconclusive { lower, upper, .. } => prop_assert!(lower <= upper),
            }
        }
    }

    #[test]
    fn verdicts_agree_with_a_state_sampler(seed in any::<u64>()) {
        let (theta, psi) = instance(seed);
        let d = inf_le(&theta, &psi, &params()).unwrap();
        match d.verdict {
            Verdict::Holds => prop_assert!(sampled_violation(&theta, &psi, seed) <= params().tol_accept),
            Verdict::Fails => {
                let (target, rho, margin) = d.witness().unwrap();
                let n = &psi.predicates()[target];
                let gap = theta.expectation_matrix(&rho) - linalg::trace_product(n, &rho).re;
                prop_assert!(gap > params().tol_accept);
                prop_assert!((gap - margin).abs() < 1e-9);
            }
            Verdict::Inconclusive => {}
        }
    }

    #[test]
    fn reflexive(seed in any::<u64>()) {
        let (theta, _) = instance(seed);
        prop_assert_eq!(inf_le(&theta, &theta, &params()).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn transitive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = register(2);
        let a = random_assertion(&mut rng, &reg, 2);
        let b = random_assertion(&mut rng, &reg, 2);
        let c = random_assertion(&mut rng, &reg, 2);
        for (x, y, z) in [(&a, &b, &c), (&a, &a, &b), (&c, &b, &a)] {
            let xy = inf_le(x, y, &params()).unwrap().verdict;
            let yz = inf_le(y, z, &params()).unwrap().verdict;
            if xy == Verdict::Holds && yz == Verdict::Holds {
                prop_assert_ne!(inf_le(x, z, &params()).unwrap().verdict, Verdict::Fails);
            }
        }
        // A chain that always holds: scaling down is Löwner-below.
        let half = Assertion::new(reg.clone(), a.iter().map(|m| m.scale(0.5)).collect()).unwrap();
        let quarter = Assertion::new(reg, a.iter().map(|m| m.scale(0.25)).collect()).unwrap();
        prop_assert_eq!(inf_le(&quarter, &half, &params()).unwrap().verdict, Verdict::Holds);
        prop_assert_eq!(inf_le(&half, &a, &params()).unwrap().verdict, Verdict::Holds);
        prop_assert_eq!(inf_le(&quarter, &a, &params()).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn order_survives_channel_adjoints(seed in any::<u64>()) {
        let (theta, psi) = instance(seed);
        if inf_le(&theta, &psi, &params()).unwrap().verdict != Verdict::Holds {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let e = random_channel(&mut rng, theta.register(), 2);
        let et = theta.map(|m| e.apply_adjoint_matrix(m));
        let ep = psi.map(|m| e.apply_adjoint_matrix(m));
        for rho in sample_states(theta.dim(), 200, seed) {
            prop_assert!(et.expectation_matrix(&rho) <= ep.expectation_matrix(&rho) + 1e-7);
        }
    }

    #[test]
    fn unions_of_holding_pairs_never_fail(seed in any::<u64>()) {
        let (t1, p1) = instance(seed);
        let (t2, p2) = instance(seed.wrapping_add(1));
        if t1.register() != t2.register()
            || inf_le(&t1, &p1, &params()).unwrap().verdict != Verdict::Holds
            || inf_le(&t2, &p2, &params()).unwrap().verdict != Verdict::Holds
        {
            return Ok(());
        }
        let v = inf_le(&t1.union(&t2).unwrap(), &p1.union(&p2).unwrap(), &params()).unwrap().verdict;
        prop_assert_ne!(v, Verdict::Fails);
    }
}

#[test]
fn prune_examples() {
    let q = VarTuple::of(&["q"]);
    let m = gates::pp();
    let twice = Assertion::new(q.clone(), vec![m.clone(), m.clone()]).unwrap();
    assert_eq!(prune(&twice, 1e-9).len(), 1);
    let below = Assertion::new(q.clone(), vec![gates::p0(), linalg::identity(2)]).unwrap();
    let p = prune(&below, 1e-9);
    assert_eq!(p.len(), 1);
    assert!(linalg::max_abs_diff(&p.predicates()[0], &gates::p0()) == 0.0);
    let incomparable = Assertion::new(q, vec![gates::p0(), gates::p1()]).unwrap();
    assert_eq!(prune(&incomparable, 1e-9).len(), 2);
}

#[test]
fn three_way_mixture_needs_all_weights() {
    // diag(1/3, 1/3, 1/3, 0) is reached only by the uniform mixture of the units.
    let reg = VarTuple::of(&["a", "b"]);
    let units: Vec<Mat> = (0..3).map(|i| linalg::matrix_unit(4, i, i)).collect();
    let theta = Assertion::new(reg.clone(), units).unwrap();
    let n = Mat::from_fn(4, 4, |i, j| if i == j && i < 3 { linalg::c(1.0 / 3.0, 0.0) } else { linalg::c(0.0, 0.0) });
    let d = inf_le(&theta, &Assertion::singleton(reg, n).unwrap(), &params()).unwrap();
    let Certificate::Holds { lambda, .. } = &d.targets[0].certificate else {
        panic!("expected holds, got {d:?}");
    };
    for l in lambda {
        assert!((l - 1.0 / 3.0).abs() < 1e-6, "{lambda:?}");
    }
}
