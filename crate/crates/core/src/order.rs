//! Certifying decisions for the Löwner order and the `⊑_inf` pre-order.
//!
//! For a target `N` and candidates `M_1..M_m`, `Θ ⊑_inf {N}` is decided through
//! `v* = min_{λ ∈ Δ} λmax(Σ_j λ_j (M_j − N))`. A weight vector with small
//! residual proves the relation; a unit vector `v` with
//! `min_j ⟨v|M_j − N|v⟩ > tol` refutes it.

use std::fmt;

use crate::assertion::Assertion;
use crate::error::{Error, Result};
use crate::linalg::{self, eig_symmetrized, outer, Mat, Vector};
use crate::operator::{extend, LabeledOperator};

#[derive(Clone, Copy, Debug)]
pub struct OrderParams {
    pub tol_accept: f64,
    pub max_iters: usize,
}

impl Default for OrderParams {
    fn default() -> Self {
        OrderParams {
            tol_accept: 1e-7,
            max_iters: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Certificate {
    /// `λmax(Σ λ_j M_j − N) = residual ≤ tol`.
    Holds { lambda: Vec<f64>, residual: f64 },
    /// `min_j ⟨v|M_j − N|v⟩ = margin > tol` for the unit vector `witness`.
    Fails { witness: Vector, margin: f64 },
    /// `lower ≤ v* ≤ upper`.
    Inconclusive {
        lower: f64,
        upper: f64,
        iterations: usize,
    },
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Holds { .. } => Verdict::Holds,
            Certificate::Fails { .. } => Verdict::Fails,
            Certificate::Inconclusive { .. } => Verdict::Inconclusive,
        }
    }
}

/// Decision for one element `N` of the right-hand assertion.
#[derive(Clone, Debug)]
pub struct TargetDecision {
    pub target: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct OrderDecision {
    pub verdict: Verdict,
    pub targets: Vec<TargetDecision>,
}

impl OrderDecision {
    /// First refuted target: `(index of N, ρ = |v⟩⟨v|, margin)`.
    pub fn witness(&self) -> Option<(usize, Mat, f64)> {
        self.targets.iter().find_map(|t| match &t.certificate {
            Certificate::Fails { witness, margin } => Some((t.target, outer(witness), *margin)),
            _ => None,
        })
    }

    /// Re-checks every certificate against the assertions it was produced for.
    pub fn verify(&self, theta: &Assertion, psi: &Assertion, tol: f64) -> Result<()> {
        let (theta, psi) = common_register(theta, psi)?;
        for t in &self.targets {
            let n = psi
                .predicates()
                .get(t.target)
                .ok_or_else(|| Error::InternalCertificate(format!("no target {}", t.target)))?;
            verify_certificate(theta.predicates(), n, &t.certificate, tol)?;
        }
        let expected = combine(self.targets.iter().map(|t| t.certificate.verdict()));
        if expected != self.verdict {
            return Err(Error::InternalCertificate("overall verdict inconsistent".into()));
        }
        Ok(())
    }
}

fn combine(vs: impl Iterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Holds;
    for v in vs {
        match v {
            Verdict::Fails => return Verdict::Fails,
            Verdict::Inconclusive => out = Verdict::Inconclusive,
            Verdict::Holds => {}
        }
    }
    out
}

fn verify_certificate(ms: &[Mat], n: &Mat, cert: &Certificate, tol: f64) -> Result<()> {
    match cert {
        Certificate::Holds { lambda, residual } => {
            if lambda.len() != ms.len() || lambda.iter().any(|&l| l.is_nan() || l < 0.0) {
                return Err(Error::InternalCertificate("weights are not on the simplex".into()));
            }
            let total: f64 = lambda.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InternalCertificate(format!("weights sum to {total}")));
            }
            let r = residual_of(ms, n, lambda);
            if r > tol || (r - residual).abs() > 1e-9 {
                return Err(Error::InternalCertificate(format!(
                    "residual {r:.3e} does not certify (claimed {residual:.3e})"
                )));
            }
        }
        Certificate::Fails { witness, margin } => {
            let norm = witness.norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InternalCertificate(format!("witness has norm {norm}")));
            }
            let g = margin_of(ms, n, witness);
            if g <= tol || (g - margin).abs() > 1e-9 {
                return Err(Error::InternalCertificate(format!(
                    "witness margin {g:.3e} does not refute (claimed {margin:.3e})"
                )));
            }
        }
        Certificate::Inconclusive { .. } => {}
    }
    Ok(())
}

/// `λmax(Σ λ_j M_j − N)`.
pub fn residual_of(ms: &[Mat], n: &Mat, lambda: &[f64]) -> f64 {
    let mut h = -n.clone();
    for (m, &l) in ms.iter().zip(lambda) {
        h += m.scale(l);
    }
    linalg::lambda_max(&h)
}

/// `min_j ⟨v|M_j − N|v⟩`.
pub fn margin_of(ms: &[Mat], n: &Mat, v: &Vector) -> f64 {
    let nv = linalg::expectation_value(n, v);
    ms.iter()
        .map(|m| linalg::expectation_value(m, v) - nv)
        .fold(f64::INFINITY, f64::min)
}

/// `a ⊑ b`, i.e. the least eigenvalue of `b − a` is at least `−tol`.
pub fn loewner_le(a: &Mat, b: &Mat, tol: f64) -> Result<bool> {
    let diff = b - a;
    Ok(linalg::eig_hermitian(&diff, 1e-9)?.min() >= -tol)
}

/// [`loewner_le`] for labelled operators, extending both to the union of their registers.
pub fn loewner_le_labeled(a: &LabeledOperator, b: &LabeledOperator, tol: f64) -> Result<bool> {
    let vars = a.vars().union(b.vars());
    loewner_le(extend(a, &vars)?.matrix(), extend(b, &vars)?.matrix(), tol)
}

fn common_register(theta: &Assertion, psi: &Assertion) -> Result<(Assertion, Assertion)> {
    if theta.register() == psi.register() {
        return Ok((theta.clone(), psi.clone()));
    }
    let vars = theta.register().union(psi.register());
    Ok((theta.extend(&vars)?, psi.extend(&vars)?))
}

/// Decides `Θ ⊑_inf Ψ`; every returned certificate has been re-verified.
pub fn inf_le(theta: &Assertion, psi: &Assertion, params: &OrderParams) -> Result<OrderDecision> {
    let (theta, psi) = common_register(theta, psi)?;
    for m in theta.iter().chain(psi.iter()) {
        let defect = linalg::hermiticity_defect(m);
        if defect > 1e-9 * linalg::max_abs(m).max(1.0) {
            return Err(Error::Hermiticity(defect));
        }
    }
    let mut targets = Vec::with_capacity(psi.len());
    for (k, n) in psi.iter().enumerate() {
        let certificate = decide_target(theta.predicates(), n, params);
        verify_certificate(theta.predicates(), n, &certificate, params.tol_accept)?;
        targets.push(TargetDecision { target: k, certificate });
    }
    let verdict = combine(targets.iter().map(|t| t.certificate.verdict()));
    Ok(OrderDecision { verdict, targets })
}

struct Search<'a> {
    ds: Vec<Mat>,
    n: &'a Mat,
    ms: &'a [Mat],
    tol: f64,
    best_upper: f64,
    best_lambda: Vec<f64>,
    best_lower: f64,
    best_vector: Option<Vector>,
    evaluations: usize,
}

impl Search<'_> {
    /// Evaluates the dual objective at `lambda`; returns `(λmax, v, g)`.
    fn eval(&mut self, lambda: &[f64]) -> (f64, Vector, Vec<f64>) {
        self.evaluations += 1;
        let d = self.n.nrows();
        let mut h = linalg::zeros(d);
        for (dj, &l) in self.ds.iter().zip(lambda) {
            h += dj.scale(l);
        }
        let s = eig_symmetrized(&h);
        let v = s.top_vector();
        let g: Vec<f64> = self.ds.iter().map(|dj| linalg::expectation_value(dj, &v)).collect();
        let u = s.max();
        if u < self.best_upper {
            self.best_upper = u;
            self.best_lambda = lambda.to_vec();
        }
        self.offer_vector(v.clone());
        (u, v, g)
    }

    fn offer_vector(&mut self, v: Vector) {
        let norm = v.norm();
        if norm == 0.0 {
            return;
        }
        let v = v.unscale(norm);
        let lower = margin_of(self.ms, self.n, &v);
        if lower > self.best_lower {
            self.best_lower = lower;
            self.best_vector = Some(v);
        }
    }

    fn settled(&self) -> Option<Certificate> {
        if self.best_upper <= self.tol {
            let lambda = normalized(&self.best_lambda);
            let residual = residual_of(self.ms, self.n, &lambda);
            if residual <= self.tol {
                return Some(Certificate::Holds { lambda, residual });
            }
        }
        if self.best_lower > self.tol {
            if let Some(v) = &self.best_vector {
                return Some(Certificate::Fails {
                    witness: v.clone(),
                    margin: self.best_lower,
                });
            }
        }
        None
    }

    fn inconclusive(&self) -> Certificate {
        Certificate::Inconclusive {
            lower: self.best_lower,
            upper: self.best_upper,
            iterations: self.evaluations,
        }
    }
}

fn normalized(lambda: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = lambda.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    clipped.iter().map(|&l| l / total).collect()
}

fn indicator(m: usize, j: usize) -> Vec<f64> {
    let mut l = vec![0.0; m];
    l[j] = 1.0;
    l
}

fn decide_target(ms: &[Mat], n: &Mat, params: &OrderParams) -> Certificate {
    let m = ms.len();
    let ds: Vec<Mat> = ms.iter().map(|mj| linalg::symmetrize(&(mj - n))).collect();
    let mut s = Search {
        ds,
        n,
        ms,
        tol: params.tol_accept,
        best_upper: f64::INFINITY,
        best_lambda: vec![1.0 / m as f64; m],
        best_lower: f64::NEG_INFINITY,
        best_vector: None,
        evaluations: 0,
    };

    // A single dominated element settles it; each element's top eigenvector
    // is also a witness candidate.
    let mut lipschitz = 0.0f64;
    for j in 0..m {
        let spectrum = eig_symmetrized(&s.ds[j]);
        s.evaluations += 1;
        lipschitz = lipschitz.max(spectrum.max().abs()).max(spectrum.min().abs());
        if spectrum.max() < s.best_upper {
            s.best_upper = spectrum.max();
            s.best_lambda = indicator(m, j);
        }
        s.offer_vector(spectrum.top_vector());
    }
    if let Some(c) = s.settled() {
        return c;
    }
    if m == 1 {
        return s.inconclusive();
    }

    s.eval(&vec![1.0 / m as f64; m]);
    if let Some(c) = s.settled() {
        return c;
    }

    if m == 2 {
        line_search(&mut s);
        if let Some(c) = s.settled() {
            return c;
        }
    }

    mirror_descent(&mut s, lipschitz, params.max_iters);
    s.settled().unwrap_or_else(|| s.inconclusive())
}

/// Golden-section search on `t ↦ λmax(t D_1 + (1 − t) D_2)`, followed by a
/// witness built from the top eigenvectors on either side of the minimiser.
fn line_search(s: &mut Search<'_>) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = s.eval(&[x1, 1.0 - x1]).0;
    let mut f2 = s.eval(&[x2, 1.0 - x2]).0;
    while b - a > 1e-13 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = s.eval(&[x1, 1.0 - x1]).0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = s.eval(&[x2, 1.0 - x2]).0;
        }
        if s.best_upper <= s.tol {
            return;
        }
    }
    let (_, va, _) = s.eval(&[a, 1.0 - a]);
    let (_, vb, _) = s.eval(&[b, 1.0 - b]);
    let diff = &s.ds[0] - &s.ds[1];
    let g = |v: &Vector| {
        let nv = v.norm();
        if nv == 0.0 {
            0.0
        } else {
            linalg::expectation_value(&diff, &v.unscale(nv))
        }
    };
    let mix = |theta: f64| -> Vector { va.scale(theta.cos()) + vb.scale(theta.sin()) };
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
    let (glo, ghi) = (g(&mix(lo)), g(&mix(hi)));
    if glo.signum() == ghi.signum() {
        return;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(&mix(mid)).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    s.offer_vector(mix(0.5 * (lo + hi)));
}

/// Entropic mirror descent on the simplex.
fn mirror_descent(s: &mut Search<'_>, lipschitz: f64, max_iters: usize) {
    let m = s.ds.len();
    if lipschitz == 0.0 {
        return;
    }
    let ln_m = (m as f64).ln();
    let mut log_w = vec![0.0f64; m];
    let mut avg = vec![0.0f64; m];
    for t in 0..max_iters {
        let shift = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_w.iter().map(|x| (x - shift).exp()).collect();
        let lambda = normalized(&w);
        let (_, _, g) = s.eval(&lambda);
        for j in 0..m {
            avg[j] += lambda[j];
        }
        if (t + 1) % 10 == 0 {
            let a: Vec<f64> = avg.iter().map(|x| x / (t + 1) as f64).collect();
            s.eval(&a);
        }
        if s.settled().is_some() {
            return;
        }
        let eta = (ln_m / (t + 1) as f64).sqrt() / lipschitz;
        for j in 0..m {
            log_w[j] -= eta * g[j];
        }
    }
}

/// Removes duplicates and every element that Löwner-dominates another one.
pub fn prune(theta: &Assertion, tol: f64) -> Assertion {
    let mut kept: Vec<Mat> = Vec::with_capacity(theta.len());
    for p in theta.iter() {
        let dominated = kept.iter().any(|k| linalg::lambda_min(&(p - k)) >= -tol);
        if dominated {
            continue;
        }
        kept.retain(|k| linalg::lambda_min(&(k - p)) < -tol);
        kept.push(p.clone());
    }
    Assertion::new(theta.register().clone(), kept).expect("pruning keeps a nonempty set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::identity;
    use crate::register::VarTuple;

    fn q() -> VarTuple {
        VarTuple::of(&["q"])
    }

    fn set(ms: Vec<Mat>) -> Assertion {
        Assertion::new(q(), ms).unwrap()
    }

    #[test]
    fn loewner_examples() {
        let t = 1e-9;
        assert!(loewner_le(&linalg::zeros(2), &gates::pp(), t).unwrap());
        assert!(!loewner_le(&gates::p0(), &identity(2).scale(0.5), t).unwrap());
        assert!(loewner_le(&gates::pp(), &identity(2), t).unwrap());
    }

    #[test]
    fn loewner_rejects_non_hermitian() {
        assert!(matches!(
            loewner_le(&linalg::zeros(2), &linalg::matrix_unit(2, 0, 1), 1e-9),
            Err(Error::Hermiticity(_))
        ));
    }

    #[test]
    fn basis_pair_below_half() {
        let d = inf_le(
            &set(vec![gates::p0(), gates::p1()]),
            &set(vec![identity(2).scale(0.5)]),
            &OrderParams::default(),
        )
        .unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
        let Certificate::Holds { lambda, residual } = &d.targets[0].certificate else {
            panic!()
        };
        assert!((lambda[0] - 0.5).abs() < 1e-12 && (lambda[1] - 0.5).abs() < 1e-12);
        assert!(residual.abs() <= 1e-9);
    }

    #[test]
    fn single_projector_not_below_half() {
        let theta = set(vec![gates::p0()]);
        let psi = set(vec![identity(2).scale(0.5)]);
        let d = inf_le(&theta, &psi, &OrderParams::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Fails);
        let (_, rho, margin) = d.witness().unwrap();
        assert!((margin - 0.5).abs() < 1e-9);
        assert!(linalg::max_abs_diff(&rho, &gates::p0()) < 1e-9);
        d.verify(&theta, &psi, 1e-7).unwrap();
    }

    #[test]
    fn reflexive_with_indicator() {
        let theta = set(vec![gates::p0(), gates::pp(), identity(2).scale(0.3)]);
        let d = inf_le(&theta, &theta, &OrderParams::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
        for t in &d.targets {
            let Certificate::Holds { lambda, .. } = &t.certificate else {
                panic!()
            };
            assert_eq!(lambda.iter().filter(|&&l| l == 1.0).count(), 1);
        }
    }

    #[test]
    fn mixture_needed_for_three_elements() {
        // (P0 + P1)/2 = I/2 but no single element is below I/2 + small slack.
        let theta = set(vec![gates::p0(), gates::p1(), identity(2)]);
        let psi = set(vec![identity(2).scale(0.55)]);
        let d = inf_le(&theta, &psi, &OrderParams::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
    }

    #[test]
    fn prune_examples() {
        assert_eq!(prune(&set(vec![gates::p0(), gates::p0()]), 1e-9).len(), 1);
        let p = prune(&set(vec![gates::p0(), identity(2)]), 1e-9);
        assert_eq!(p.len(), 1);
        assert!(linalg::max_abs_diff(&p.predicates()[0], &gates::p0()) < 1e-15);
        assert_eq!(prune(&set(vec![gates::p0(), gates::p1()]), 1e-9).len(), 2);
    }
}
