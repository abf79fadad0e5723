//! Finite sets of quantum predicates over a fixed register.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Tolerances};
use crate::operator::{check_predicate, extend_matrix, DensityOperator, LabeledOperator};
use crate::register::VarTuple;

/// Entrywise distance under which two predicates are treated as the same element.
pub const DEDUP_TOL: f64 = 1e-10;

/// A finite, nonempty set of predicates, all on `register`.
///
/// Satisfaction by a state is the minimum of the individual expectations.
#[derive(Clone, Debug)]
pub struct Assertion {
    register: VarTuple,
    predicates: Vec<Mat>,
}

impl Assertion {
    /// Builds an assertion from full-register matrices, removing duplicates.
    pub fn new(register: VarTuple, predicates: Vec<Mat>) -> Result<Self> {
        if predicates.is_empty() {
            return Err(Error::Validation("assertion must contain at least one predicate".into()));
        }
        let dim = register.dim();
        for p in &predicates {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.nrows(),
                });
            }
        }
        let mut a = Assertion {
            register,
            predicates: Vec::with_capacity(predicates.len()),
        };
        for p in predicates {
            a.push_dedup(p);
        }
        Ok(a)
    }

    pub fn singleton(register: VarTuple, predicate: Mat) -> Result<Self> {
        Self::new(register, vec![predicate])
    }

    /// Extends each labelled operator to `register`.
    pub fn from_operators(register: &VarTuple, ops: &[LabeledOperator]) -> Result<Self> {
        let mats = ops
            .iter()
            .map(|o| extend_matrix(o.matrix(), o.vars(), register))
            .collect::<Result<Vec<_>>>()?;
        Self::new(register.clone(), mats)
    }

    pub fn identity(register: VarTuple) -> Self {
        let d = register.dim();
        Assertion {
            register,
            predicates: vec![linalg::identity(d)],
        }
    }

    pub fn zero(register: VarTuple) -> Self {
        let d = register.dim();
        Assertion {
            register,
            predicates: vec![linalg::zeros(d)],
        }
    }

    fn push_dedup(&mut self, p: Mat) {
        if !self.contains(&p, DEDUP_TOL) {
            self.predicates.push(p);
        }
    }

    pub fn contains(&self, p: &Mat, tol: f64) -> bool {
        self.predicates.iter().any(|q| linalg::max_abs_diff(p, q) <= tol)
    }

    pub fn register(&self) -> &VarTuple {
        &self.register
    }

    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    pub fn predicates(&self) -> &[Mat] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Mat> {
        self.predicates.iter()
    }

    /// Set union, keeping `self` order first.
    pub fn union(&self, other: &Assertion) -> Result<Assertion> {
        if self.register != other.register {
            return Err(Error::Extension {
                from: other.register.to_string(),
                to: self.register.to_string(),
            });
        }
        let mut out = self.clone();
        for p in &other.predicates {
            out.push_dedup(p.clone());
        }
        Ok(out)
    }

    /// Cylinder extension of every element to `target`.
    pub fn extend(&self, target: &VarTuple) -> Result<Assertion> {
        if &self.register == target {
            return Ok(self.clone());
        }
        let mats = self
            .predicates
            .iter()
            .map(|p| extend_matrix(p, &self.register, target))
            .collect::<Result<Vec<_>>>()?;
        Assertion::new(target.clone(), mats)
    }

    /// Element-wise image under `f`.
    pub fn map(&self, f: impl Fn(&Mat) -> Mat) -> Assertion {
        let mut out = Assertion {
            register: self.register.clone(),
            predicates: Vec::with_capacity(self.len()),
        };
        for p in &self.predicates {
            out.push_dedup(f(p));
        }
        out
    }

    /// Checks `0 ⊑ M ⊑ I` for every element.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        self.predicates.iter().try_for_each(|p| check_predicate(p, tol))
    }

    /// Equality as sets, entrywise within `tol`.
    pub fn set_eq(&self, other: &Assertion, tol: f64) -> bool {
        self.register == other.register
            && self.predicates.iter().all(|p| other.contains(p, tol))
            && other.predicates.iter().all(|p| self.contains(p, tol))
    }

    /// Expectation `min_M Re tr(Mρ)` of a state on the same register.
    pub fn expectation_matrix(&self, rho: &Mat) -> f64 {
        self.predicates
            .iter()
            .map(|m| linalg::trace_product(m, rho).re)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Exp(ρ ⊨ Θ)`; the assertion is extended to `rho`'s register when needed.
pub fn expectation(rho: &DensityOperator, theta: &Assertion) -> Result<f64> {
    if rho.vars() == theta.register() {
        return Ok(theta.expectation_matrix(rho.matrix()));
    }
    let mut best = f64::INFINITY;
    for m in theta.predicates() {
        let ext = extend_matrix(m, theta.register(), rho.vars())?;
        best = best.min(linalg::trace_product(&ext, rho.matrix()).re);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::identity;

    fn q() -> VarTuple {
        VarTuple::of(&["q"])
    }

    fn dens(m: Mat) -> DensityOperator {
        DensityOperator::from_parts_unchecked(q(), m)
    }

    #[test]
    fn basis_pair_on_zero_state() {
        let theta = Assertion::new(q(), vec![gates::p0(), gates::p1()]).unwrap();
        assert_eq!(expectation(&dens(gates::p0()), &theta).unwrap(), 0.0);
    }

    #[test]
    fn half_identity_gives_half_trace() {
        let theta = Assertion::singleton(q(), identity(2).scale(0.5)).unwrap();
        let rho = gates::pp().scale(0.6) + gates::p1().scale(0.2);
        let got = expectation(&dens(rho.clone()), &theta).unwrap();
        assert!((got - linalg::trace(&rho).re / 2.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_on_basis_pair() {
        let theta = Assertion::new(q(), vec![gates::p0(), gates::p1()]).unwrap();
        let got = expectation(&dens(identity(2).scale(0.5)), &theta).unwrap();
        assert!((got - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dedup_on_construction() {
        let a = Assertion::new(q(), vec![gates::p0(), gates::p0(), gates::p1()]).unwrap();
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn expectation_extends_assertion() {
        let theta = Assertion::singleton(q(), gates::p1()).unwrap();
        let vars = VarTuple::of(&["r", "q"]);
        let rho = DensityOperator::from_parts_unchecked(vars, linalg::matrix_unit(4, 1, 1));
        assert!((expectation(&rho, &theta).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_assertion_rejected() {
        assert!(Assertion::new(q(), vec![]).is_err());
    }
}
