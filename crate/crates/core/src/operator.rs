//! Operators attached to named qubit registers.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Tolerances, Vector};
use crate::register::VarTuple;

/// A square matrix acting on the qubits `vars` (first variable = MSB).
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator {
    vars: VarTuple,
    matrix: Mat,
}

impl LabeledOperator {
    pub fn new(vars: VarTuple, matrix: Mat) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != vars.dim() {
            return Err(Error::DimensionMismatch {
                expected: vars.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(LabeledOperator { vars, matrix })
    }

    pub fn vars(&self) -> &VarTuple {
        &self.vars
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Kronecker product on the concatenated register.
pub fn tensor(a: &LabeledOperator, b: &LabeledOperator) -> Result<LabeledOperator> {
    let vars = a.vars.concat(&b.vars)?;
    LabeledOperator::new(vars, linalg::kron(&a.matrix, &b.matrix))
}

/// Bit positions (shift amounts) of each variable of `sub` inside `target`.
fn shifts(sub: &VarTuple, target: &VarTuple) -> Vec<usize> {
    let n = target.len();
    sub.names()
        .iter()
        .map(|v| n - 1 - target.position(v).expect("checked subset"))
        .collect()
}

/// Extracts the index of the sub-register from a full-register index.
fn gather(index: usize, shifts: &[usize]) -> usize {
    shifts
        .iter()
        .fold(0, |acc, &s| (acc << 1) | ((index >> s) & 1))
}

/// Cylinder extension: pads `op` with identity on `target ∖ op.vars` and
/// reorders to the variable order of `target`.
pub fn extend(op: &LabeledOperator, target: &VarTuple) -> Result<LabeledOperator> {
    let matrix = extend_matrix(op.matrix(), op.vars(), target)?;
    LabeledOperator::new(target.clone(), matrix)
}

/// Matrix-level [`extend`].
pub fn extend_matrix(matrix: &Mat, vars: &VarTuple, target: &VarTuple) -> Result<Mat> {
    if !vars.is_subset_of(target) {
        return Err(Error::Extension {
            from: vars.to_string(),
            to: target.to_string(),
        });
    }
    if vars == target {
        return Ok(matrix.clone());
    }
    let op_shifts = shifts(vars, target);
    let rest = target.minus(vars);
    let rest_shifts = shifts(&rest, target);
    let dim = target.dim();
    let sub: Vec<usize> = (0..dim).map(|x| gather(x, &op_shifts)).collect();
    let env: Vec<usize> = (0..dim).map(|x| gather(x, &rest_shifts)).collect();
    let mut out = Mat::zeros(dim, dim);
    for x in 0..dim {
        for y in 0..dim {
            if env[x] == env[y] {
                out[(x, y)] = matrix[(sub[x], sub[y])];
            }
        }
    }
    Ok(out)
}

/// Reduced operator on `keep` (in `keep` order), tracing out the rest.
pub fn partial_trace_matrix(matrix: &Mat, vars: &VarTuple, keep: &VarTuple) -> Result<Mat> {
    if !keep.is_subset_of(vars) {
        return Err(Error::Extension {
            from: keep.to_string(),
            to: vars.to_string(),
        });
    }
    let keep_shifts = shifts(keep, vars);
    let rest = vars.minus(keep);
    let rest_shifts = shifts(&rest, vars);
    let dk = keep.dim();
    let dr = rest.dim();
    // full index from (kept index, traced index)
    let compose = |k: usize, r: usize| -> usize {
        let mut x = 0usize;
        for (i, &s) in keep_shifts.iter().enumerate() {
            x |= ((k >> (keep_shifts.len() - 1 - i)) & 1) << s;
        }
        for (i, &s) in rest_shifts.iter().enumerate() {
            x |= ((r >> (rest_shifts.len() - 1 - i)) & 1) << s;
        }
        x
    };
    let mut out = Mat::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = linalg::ZERO;
            for r in 0..dr {
                acc += matrix[(compose(a, r), compose(b, r))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Hermitian operator `M` with `0 ⊑ M ⊑ I`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumPredicate(LabeledOperator);

impl QuantumPredicate {
    pub fn new(op: LabeledOperator, tol: &Tolerances) -> Result<Self> {
        check_predicate(op.matrix(), tol)?;
        Ok(QuantumPredicate(op))
    }

    pub fn operator(&self) -> &LabeledOperator {
        &self.0
    }
}

/// Validates `0 ⊑ M ⊑ I` within `tol`.
pub fn check_predicate(m: &Mat, tol: &Tolerances) -> Result<()> {
    let defect = linalg::hermiticity_defect(m);
    if defect > tol.herm {
        return Err(Error::Hermiticity(defect));
    }
    let s = linalg::eig_symmetrized(m);
    if s.min() < -tol.psd {
        return Err(Error::Validation(format!(
            "predicate has negative eigenvalue {:.3e}",
            s.min()
        )));
    }
    if s.max() > 1.0 + tol.psd {
        return Err(Error::Validation(format!(
            "predicate has eigenvalue {:.6} above 1",
            s.max()
        )));
    }
    Ok(())
}

/// Positive operator with trace at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(LabeledOperator);

impl DensityOperator {
    pub fn new(op: LabeledOperator, tol: &Tolerances) -> Result<Self> {
        let m = op.matrix();
        let defect = linalg::hermiticity_defect(m);
        if defect > tol.herm {
            return Err(Error::Hermiticity(defect));
        }
        if linalg::lambda_min(m) < -tol.psd {
            return Err(Error::Validation("density operator is not positive".into()));
        }
        let tr = linalg::trace(m).re;
        if tr > 1.0 + tol.trace {
            return Err(Error::Validation(format!("density operator has trace {tr}")));
        }
        Ok(DensityOperator(op))
    }

    /// Normalised pure state `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(vars: VarTuple, psi: &Vector) -> Result<Self> {
        let n = psi.norm();
        let m = linalg::outer(psi).unscale(n * n);
        Ok(DensityOperator(LabeledOperator::new(vars, m)?))
    }

    pub fn operator(&self) -> &LabeledOperator {
        &self.0
    }

    pub fn matrix(&self) -> &Mat {
        self.0.matrix()
    }

    pub fn vars(&self) -> &VarTuple {
        self.0.vars()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.0.matrix()).re
    }

    /// Reduced state on `keep`.
    pub fn partial_trace(&self, keep: &VarTuple) -> Result<DensityOperator> {
        let m = partial_trace_matrix(self.matrix(), self.vars(), keep)?;
        Ok(DensityOperator(LabeledOperator::new(keep.clone(), m)?))
    }

    pub(crate) fn from_parts_unchecked(vars: VarTuple, matrix: Mat) -> Self {
        DensityOperator(LabeledOperator { vars, matrix })
    }
}

/// Two-outcome projective measurement `{P0, P1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    vars: VarTuple,
    p0: Mat,
    p1: Mat,
}

impl ProjectiveMeasurement {
    pub fn new(vars: VarTuple, p0: Mat, p1: Mat, tol: &Tolerances) -> Result<Self> {
        check_measurement(&p0, &p1, tol)?;
        if p0.nrows() != vars.dim() {
            return Err(Error::DimensionMismatch {
                expected: vars.dim(),
                found: p0.nrows(),
            });
        }
        Ok(ProjectiveMeasurement { vars, p0, p1 })
    }

    pub fn vars(&self) -> &VarTuple {
        &self.vars
    }

    pub fn p0(&self) -> &Mat {
        &self.p0
    }

    pub fn p1(&self) -> &Mat {
        &self.p1
    }
}

/// Checks Hermitian, idempotent and complete projector pair.
pub fn check_measurement(p0: &Mat, p1: &Mat, tol: &Tolerances) -> Result<()> {
    if p0.shape() != p1.shape() || !p0.is_square() {
        return Err(Error::Validation(
            "measurement projectors must be square and of equal size".into(),
        ));
    }
    for (name, p) in [("P0", p0), ("P1", p1)] {
        if linalg::hermiticity_defect(p) > tol.herm {
            return Err(Error::Validation(format!("{name} is not Hermitian")));
        }
        if linalg::max_abs_diff(&(p * p), p) > tol.herm {
            return Err(Error::Validation(format!("{name} is not idempotent")));
        }
    }
    if linalg::max_abs_diff(&(p0 + p1), &linalg::identity(p0.nrows())) > tol.herm {
        return Err(Error::Validation("projectors do not sum to identity".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::{c, from_real_rows, identity, matrix_unit};

    fn op(vars: &[&str], m: Mat) -> LabeledOperator {
        LabeledOperator::new(VarTuple::of(vars), m).unwrap()
    }

    #[test]
    fn tensor_with_identity() {
        let t = tensor(&op(&["q"], gates::x()), &op(&["r"], identity(2))).unwrap();
        assert_eq!(t.vars(), &VarTuple::of(&["q", "r"]));
        assert!(linalg::max_abs_diff(t.matrix(), &linalg::kron(&gates::x(), &identity(2))) < 1e-15);
    }

    #[test]
    fn tensor_basis_projectors_msb_first() {
        let t = tensor(&op(&["q1"], matrix_unit(2, 0, 0)), &op(&["q2"], matrix_unit(2, 1, 1))).unwrap();
        assert!(linalg::max_abs_diff(t.matrix(), &matrix_unit(4, 1, 1)) < 1e-15);
    }

    #[test]
    fn tensor_of_hadamards_gives_uniform_amplitudes() {
        let t = tensor(&op(&["q"], gates::h()), &op(&["r"], gates::h())).unwrap();
        let v = t.matrix() * linalg::ket(4, 0);
        for a in v.iter() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_overlap_fails() {
        let a = op(&["q"], gates::x());
        assert!(matches!(tensor(&a, &a), Err(Error::Disjointness(_))));
    }

    #[test]
    fn extend_noop() {
        let a = op(&["q"], gates::x());
        assert_eq!(extend(&a, &VarTuple::of(&["q"])).unwrap(), a);
    }

    #[test]
    fn extend_projector_on_second_qubit() {
        let a = op(&["q2"], matrix_unit(2, 1, 1));
        let e = extend(&a, &VarTuple::of(&["q1", "q2"])).unwrap();
        let expected = from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(linalg::max_abs_diff(e.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn extend_swapped_cnot() {
        // CX on (q2, q1): q2 controls, q1 is the target.
        let e = extend(&op(&["q2", "q1"], gates::cx()), &VarTuple::of(&["q1", "q2"])).unwrap();
        // |x⟩_{q1}|y⟩_{q2} ↦ |x⊕y⟩_{q1}|y⟩_{q2}, index = 2x + y
        let mut expected = Mat::zeros(4, 4);
        for x in 0..2 {
            for y in 0..2 {
                expected[(2 * (x ^ y) + y, 2 * x + y)] = c(1.0, 0.0);
            }
        }
        assert!(linalg::max_abs_diff(e.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn extend_outside_target_fails() {
        let a = op(&["z"], gates::x());
        assert!(matches!(
            extend(&a, &VarTuple::of(&["q"])),
            Err(Error::Extension { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = linalg::kron(&matrix_unit(2, 0, 0), &matrix_unit(2, 1, 1));
        let vars = VarTuple::of(&["a", "b"]);
        let r = partial_trace_matrix(&rho, &vars, &VarTuple::of(&["a"])).unwrap();
        assert!(linalg::max_abs_diff(&r, &matrix_unit(2, 0, 0)) < 1e-15);
        let r = partial_trace_matrix(&rho, &vars, &VarTuple::of(&["b"])).unwrap();
        assert!(linalg::max_abs_diff(&r, &matrix_unit(2, 1, 1)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = Vector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        let rho = DensityOperator::pure(VarTuple::of(&["a", "b"]), &psi).unwrap();
        let r = rho.partial_trace(&VarTuple::of(&["a"])).unwrap();
        assert!(linalg::max_abs_diff(r.matrix(), &identity(2).scale(0.5)) < 1e-12);
    }

    #[test]
    fn partial_trace_keeps_requested_order() {
        let a = matrix_unit(2, 0, 1);
        let b = matrix_unit(2, 1, 1);
        let rho = linalg::kron(&a, &b);
        let vars = VarTuple::of(&["a", "b"]);
        let r = partial_trace_matrix(&rho, &vars, &VarTuple::of(&["b", "a"])).unwrap();
        assert!(linalg::max_abs_diff(&r, &linalg::kron(&b, &a)) < 1e-15);
    }

    #[test]
    fn partial_trace_unknown_var() {
        let rho = identity(2);
        assert!(partial_trace_matrix(&rho, &VarTuple::of(&["a"]), &VarTuple::of(&["b"])).is_err());
    }

    #[test]
    fn predicate_validation() {
        let tol = Tolerances::default();
        assert!(check_predicate(&identity(2), &tol).is_ok());
        assert!(check_predicate(&identity(2).scale(2.0), &tol).is_err());
        assert!(check_predicate(&identity(2).scale(-0.1), &tol).is_err());
        assert!(check_predicate(&matrix_unit(2, 0, 1), &tol).is_err());
    }

    #[test]
    fn measurement_validation() {
        let tol = Tolerances::default();
        let p0 = matrix_unit(2, 0, 0);
        let p1 = matrix_unit(2, 1, 1);
        assert!(check_measurement(&p0, &p1, &tol).is_ok());
        assert!(check_measurement(&p0, &p0, &tol).is_err());
        assert!(check_measurement(&p0.scale(0.5), &(identity(2) - p0.scale(0.5)), &tol).is_err());
    }
}
