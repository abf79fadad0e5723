//! Super-operators in Kraus form.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Tolerances};
use crate::operator::{extend_matrix, DensityOperator};
use crate::register::VarTuple;

/// Completely positive, trace-nonincreasing map `A ↦ Σ E_i A E_i†`.
#[derive(Clone, Debug)]
pub struct SuperOperator {
    vars: VarTuple,
    kraus: Vec<Mat>,
}

impl SuperOperator {
    /// Builds a super-operator, checking dimensions and `Σ E_i†E_i ⊑ I`.
    pub fn new(vars: VarTuple, kraus: Vec<Mat>, tol: &Tolerances) -> Result<Self> {
        let op = Self::from_kraus_unchecked(vars, kraus)?;
        let gram = op.kraus_gram();
        let top = linalg::lambda_max(&gram);
        if top > 1.0 + tol.psd {
            return Err(Error::Validation(format!(
                "super-operator increases trace (λmax of ΣE†E = {top:.6})"
            )));
        }
        Ok(op)
    }

    /// Builds a super-operator checking only dimensions.
    pub fn from_kraus_unchecked(vars: VarTuple, kraus: Vec<Mat>) -> Result<Self> {
        let dim = vars.dim();
        if kraus.is_empty() {
            return Err(Error::Validation("empty Kraus list".into()));
        }
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.nrows(),
                });
            }
        }
        Ok(SuperOperator { vars, kraus })
    }

    pub fn identity(vars: VarTuple) -> Self {
        let d = vars.dim();
        SuperOperator {
            vars,
            kraus: vec![linalg::identity(d)],
        }
    }

    /// The map sending everything to 0.
    pub fn zero(vars: VarTuple) -> Self {
        let d = vars.dim();
        SuperOperator {
            vars,
            kraus: vec![linalg::zeros(d)],
        }
    }

    pub fn unitary(vars: VarTuple, u: Mat) -> Result<Self> {
        Self::from_kraus_unchecked(vars, vec![u])
    }

    /// `ρ ↦ PρP`.
    pub fn projection(vars: VarTuple, p: Mat) -> Result<Self> {
        Self::from_kraus_unchecked(vars, vec![p])
    }

    /// Reset of every qubit in `vars` to `|0⟩`: Kraus `{|0⟩⟨i|}`.
    pub fn set_zero(vars: VarTuple) -> Self {
        let d = vars.dim();
        let kraus = (0..d).map(|i| linalg::matrix_unit(d, 0, i)).collect();
        SuperOperator { vars, kraus }
    }

    pub fn vars(&self) -> &VarTuple {
        &self.vars
    }

    pub fn kraus(&self) -> &[Mat] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.vars.dim()
    }

    /// `Σ E_i†E_i`.
    pub fn kraus_gram(&self) -> Mat {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(linalg::zeros(d), |acc, k| acc + k.adjoint() * k)
    }

    /// Cylinder extension to a larger register.
    pub fn extend(&self, target: &VarTuple) -> Result<SuperOperator> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let kraus = self
            .kraus
            .iter()
            .map(|k| extend_matrix(k, &self.vars, target))
            .collect::<Result<Vec<_>>>()?;
        Ok(SuperOperator {
            vars: target.clone(),
            kraus,
        })
    }

    /// `Σ E_i A E_i†` for a matrix on this operator's register.
    pub fn apply_matrix(&self, a: &Mat) -> Mat {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(linalg::zeros(d), |acc, k| acc + k * a * k.adjoint())
    }

    /// Applies the channel to a state on a register containing `self.vars`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let e = self.extend(rho.vars())?;
        Ok(DensityOperator::from_parts_unchecked(
            rho.vars().clone(),
            e.apply_matrix(rho.matrix()),
        ))
    }

    /// Adjoint super-operator with Kraus operators `{E_i†}`.
    pub fn adjoint(&self) -> SuperOperator {
        SuperOperator {
            vars: self.vars.clone(),
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
        }
    }

    /// `ℰ†(M) = Σ E_i† M E_i`.
    pub fn apply_adjoint_matrix(&self, m: &Mat) -> Mat {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(linalg::zeros(d), |acc, k| acc + k.adjoint() * m * k)
    }

    /// Kraus count of the canonical (Choi) representation bound.
    fn kraus_limit(&self) -> usize {
        self.dim() * self.dim()
    }

    /// Re-expresses the channel with at most `d²` Kraus operators when the
    /// current list is longer than that.
    pub fn compressed(self) -> SuperOperator {
        if self.kraus.len() <= self.kraus_limit() {
            return self;
        }
        let d = self.dim();
        let spectrum = linalg::eig_symmetrized(&self.choi());
        let scale = spectrum.max().abs().max(1.0);
        let mut kraus = Vec::new();
        for (k, &mu) in spectrum.values.iter().enumerate() {
            if mu <= 1e-14 * scale {
                continue;
            }
            let w = spectrum.vectors.column(k);
            let s = mu.sqrt();
            kraus.push(Mat::from_fn(d, d, |j, i| w[i * d + j] * s));
        }
        if kraus.is_empty() {
            kraus.push(linalg::zeros(d));
        }
        SuperOperator {
            vars: self.vars,
            kraus,
        }
    }

    /// Choi matrix `Σ_k |E_k⟩⟩⟨⟨E_k|` with `|E⟩⟩ = Σ_i |i⟩ ⊗ E|i⟩`.
    pub fn choi(&self) -> Mat {
        let d = self.dim();
        let mut j = linalg::zeros(d * d);
        for k in &self.kraus {
            let v = linalg::Vector::from_fn(d * d, |idx, _| k[(idx % d, idx / d)]);
            j += &v * v.adjoint();
        }
        j
    }

    /// Matrix of the channel acting on row-major vectorised operators:
    /// `Σ E ⊗ conj(E)`. Two channels are equal iff their transfer matrices are.
    pub fn transfer_matrix(&self) -> Mat {
        let d = self.dim();
        let mut t = linalg::zeros(d * d);
        for k in &self.kraus {
            t += linalg::kron(k, &k.conjugate());
        }
        t
    }
}

/// `f ∘ e` (apply `e` first), on the union of both registers.
pub fn compose(f: &SuperOperator, e: &SuperOperator) -> Result<SuperOperator> {
    let vars = e.vars().union(f.vars());
    let f = f.extend(&vars)?;
    let e = e.extend(&vars)?;
    let mut kraus = Vec::with_capacity(f.kraus.len() * e.kraus.len());
    for fk in &f.kraus {
        for ek in &e.kraus {
            kraus.push(fk * ek);
        }
    }
    Ok(SuperOperator { vars, kraus }.compressed())
}

/// `a + b` (Kraus list concatenation).
pub fn sum(a: &SuperOperator, b: &SuperOperator) -> Result<SuperOperator> {
    let vars = a.vars().union(b.vars());
    let a = a.extend(&vars)?;
    let b = b.extend(&vars)?;
    let mut kraus = a.kraus;
    kraus.extend(b.kraus);
    Ok(SuperOperator { vars, kraus }.compressed())
}

/// Equality of action on every matrix unit, within `tol` entrywise.
pub fn channels_equal(a: &SuperOperator, b: &SuperOperator, tol: f64) -> bool {
    let vars = a.vars().union(b.vars());
    match (a.extend(&vars), b.extend(&vars)) {
        (Ok(a), Ok(b)) => linalg::max_abs_diff(&a.transfer_matrix(), &b.transfer_matrix()) <= tol,
        _ => false,
    }
}

/// `a ⪯ b`: the difference `b − a` is completely positive (Choi PSD).
pub fn channel_below(a: &SuperOperator, b: &SuperOperator, tol: f64) -> Result<bool> {
    let vars = a.vars().union(b.vars());
    let diff = b.extend(&vars)?.choi() - a.extend(&vars)?.choi();
    Ok(linalg::lambda_min(&diff) >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::{identity, matrix_unit, trace_product};

    fn q() -> VarTuple {
        VarTuple::of(&["q"])
    }

    fn dens(vars: VarTuple, m: Mat) -> DensityOperator {
        DensityOperator::from_parts_unchecked(vars, m)
    }

    #[test]
    fn x_flips_basis_state() {
        let e = SuperOperator::unitary(q(), gates::x()).unwrap();
        let out = e.apply(&dens(q(), matrix_unit(2, 0, 0))).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), &matrix_unit(2, 1, 1)) < 1e-15);
    }

    #[test]
    fn reset_sends_one_to_zero() {
        let e = SuperOperator::set_zero(q());
        assert_eq!(e.kraus().len(), 2);
        let out = e.apply(&dens(q(), matrix_unit(2, 1, 1))).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), &matrix_unit(2, 0, 0)) < 1e-15);
    }

    #[test]
    fn projector_on_maximally_mixed() {
        let vars = VarTuple::of(&["a", "b"]);
        let p = matrix_unit(4, 2, 2);
        let e = SuperOperator::projection(vars.clone(), p.clone()).unwrap();
        let out = e.apply(&dens(vars, identity(4).scale(0.25))).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), &p.scale(0.25)) < 1e-15);
    }

    #[test]
    fn adjoint_of_unitary_channel() {
        let u = gates::h() * gates::z();
        let e = SuperOperator::unitary(q(), u.clone()).unwrap();
        let adj = e.adjoint();
        assert!(linalg::max_abs_diff(&adj.kraus()[0], &u.adjoint()) < 1e-15);
    }

    #[test]
    fn adjoint_of_reset() {
        // Σ_i |i⟩⟨0| M |0⟩⟨i| = ⟨0|M|0⟩ I for a single qubit
        let e = SuperOperator::set_zero(q());
        let m = Mat::from_fn(2, 2, |i, j| linalg::c((1 + i + 2 * j) as f64, i as f64 - j as f64));
        let got = e.apply_adjoint_matrix(&m);
        let mut want = linalg::zeros(2);
        for i in 0..2 {
            want += matrix_unit(2, i, 0) * &m * matrix_unit(2, 0, i);
        }
        assert!(linalg::max_abs_diff(&got, &want) < 1e-14);
        assert!(linalg::max_abs_diff(&got, &identity(2).scale(m[(0, 0)].re)) < 1e-14);
    }

    #[test]
    fn adjoint_of_projection_is_itself() {
        let e = SuperOperator::projection(q(), gates::pp()).unwrap();
        assert!(channels_equal(&e, &e.adjoint(), 1e-14));
    }

    #[test]
    fn adjoint_duality_on_fixed_example() {
        let e = SuperOperator::set_zero(q());
        let a = gates::pp();
        let b = gates::p1() + gates::pm().scale(0.5);
        let lhs = trace_product(&e.apply_matrix(&a), &b);
        let rhs = trace_product(&a, &e.apply_adjoint_matrix(&b));
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn x_twice_is_identity() {
        let x = SuperOperator::unitary(q(), gates::x()).unwrap();
        let xx = compose(&x, &x).unwrap();
        assert!(channels_equal(&xx, &SuperOperator::identity(q()), 1e-14));
    }

    #[test]
    fn cx_twice_is_identity() {
        let vars = VarTuple::of(&["q", "q1"]);
        let cx = SuperOperator::unitary(vars.clone(), gates::cx()).unwrap();
        assert!(channels_equal(&compose(&cx, &cx).unwrap(), &SuperOperator::identity(vars), 1e-14));
    }

    #[test]
    fn compose_extends_to_union() {
        let x = SuperOperator::unitary(q(), gates::x()).unwrap();
        let z = SuperOperator::unitary(VarTuple::of(&["r"]), gates::z()).unwrap();
        let zx = compose(&z, &x).unwrap();
        assert_eq!(zx.vars(), &VarTuple::of(&["q", "r"]));
        let want = SuperOperator::unitary(zx.vars().clone(), linalg::kron(&gates::x(), &gates::z())).unwrap();
        assert!(channels_equal(&zx, &want, 1e-14));
    }

    #[test]
    fn compression_preserves_action() {
        let vars = q();
        let kraus: Vec<Mat> = (0..7)
            .map(|k| Mat::from_fn(2, 2, |i, j| linalg::c(((i + k) % 3) as f64 * 0.1, (j * k) as f64 * 0.05)))
            .collect();
        let e = SuperOperator::from_kraus_unchecked(vars, kraus).unwrap();
        let small = e.clone().compressed();
        assert!(small.kraus().len() <= 4);
        assert!(channels_equal(&e, &small, 1e-12));
    }

    #[test]
    fn measurement_channel_preserves_trace() {
        let p0 = SuperOperator::projection(q(), gates::p0()).unwrap();
        let p1 = SuperOperator::projection(q(), gates::p1()).unwrap();
        let m = sum(&p0, &p1).unwrap();
        let rho = gates::pp().scale(0.7);
        assert!((linalg::trace(&m.apply_matrix(&rho)).re - 0.7).abs() < 1e-12);
    }

    #[test]
    fn trace_increasing_kraus_rejected() {
        let r = SuperOperator::new(q(), vec![identity(2).scale(1.5)], &Tolerances::default());
        assert!(r.is_err());
    }

    #[test]
    fn below_order_on_channels() {
        let p0 = SuperOperator::projection(q(), gates::p0()).unwrap();
        let id = SuperOperator::identity(q());
        let full = sum(&p0, &SuperOperator::projection(q(), gates::p1()).unwrap()).unwrap();
        assert!(channel_below(&p0, &full, 1e-9).unwrap());
        assert!(!channel_below(&id, &p0, 1e-9).unwrap());
    }
}
