//! Dense complex matrices and the numerical tolerances shared by every module.
//!
//! Everything is stored as `nalgebra::DMatrix<Complex64>`. The computational
//! basis index of a register is big-endian in the variable order: the first
//! variable of a tuple is the most significant bit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical bands used in place of exact comparisons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Max-entry deviation allowed for Hermiticity, idempotence and completeness.
    pub herm: f64,
    /// Slack on eigenvalue signs for positivity checks.
    pub psd: f64,
    /// Slack on traces of (partial) density operators.
    pub trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-9,
            psd: 1e-7,
            trace: 1e-9,
        }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> Mat {
    Mat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> Mat {
    Mat::zeros(dim, dim)
}

/// Computational basis vector `|index⟩` in dimension `dim`.
pub fn ket(dim: usize, index: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[index] = ONE;
    v
}

/// `|v⟩⟨v|` for an arbitrary (not necessarily normalised) vector.
pub fn outer(v: &Vector) -> Mat {
    v * v.adjoint()
}

/// `|i⟩⟨j|` in dimension `dim`.
pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(dim);
    m[(i, j)] = ONE;
    m
}

pub fn from_real_rows(rows: &[&[f64]]) -> Mat {
    let n = rows.len();
    Mat::from_fn(n, n, |i, j| c(rows[i][j], 0.0))
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn trace(a: &Mat) -> C64 {
    a.trace()
}

/// `Re tr(AB)` without forming the product.
pub fn trace_product(a: &Mat, b: &Mat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Max-entry distance between `a` and `a†`.
pub fn hermiticity_defect(a: &Mat) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn symmetrize(a: &Mat) -> Mat {
    (a + a.adjoint()).scale(0.5)
}

/// Smallest `n` with `2^n == dim`, if `dim` is a power of two.
pub fn qubit_count(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Spectrum of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: Mat,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn top_vector(&self) -> Vector {
        self.vectors.column(0).into_owned()
    }

    pub fn bottom_vector(&self) -> Vector {
        self.vectors.column(self.values.len() - 1).into_owned()
    }
}

/// Hermitian eigendecomposition; rejects inputs further than `herm_tol`
/// from Hermitian and symmetrizes the rest before decomposing.
pub fn eig_hermitian(a: &Mat, herm_tol: f64) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let scale = max_abs(a).max(1.0);
    let defect = hermiticity_defect(a);
    if defect > herm_tol * scale {
        return Err(Error::Hermiticity(defect));
    }
    Ok(eig_symmetrized(a))
}

/// Decomposition of `(a + a†)/2` with no Hermiticity check.
pub(crate) fn eig_symmetrized(a: &Mat) -> Spectrum {
    let n = a.nrows();
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Spectrum { values, vectors }
}

/// Largest eigenvalue of the Hermitian part of `a`.
pub fn lambda_max(a: &Mat) -> f64 {
    eig_symmetrized(a).max()
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn lambda_min(a: &Mat) -> f64 {
    eig_symmetrized(a).min()
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(a: &Mat) -> f64 {
    let s = eig_symmetrized(a);
    s.max().abs().max(s.min().abs())
}

/// `⟨v|A|v⟩` (real part).
pub fn expectation_value(a: &Mat, v: &Vector) -> f64 {
    (v.adjoint() * a * v)[(0, 0)].re
}

pub fn is_unitary(u: &Mat, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u.adjoint() * u), &identity(u.nrows())) <= tol
}

/// Rounds tiny entries to zero; used before rendering and persisting.
pub fn chop(a: &Mat, eps: f64) -> Mat {
    a.map(|z| {
        let re = if z.re.abs() < eps { 0.0 } else { z.re };
        let im = if z.im.abs() < eps { 0.0 } else { z.im };
        c(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_of_pauli_z() {
        let z = from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let s = eig_hermitian(&z, 1e-9).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!((s.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_plus_projector() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Vector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
        let s = eig_hermitian(&outer(&plus), 1e-9).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!(s.values[1].abs() < 1e-12);
        let v = s.top_vector();
        let overlap = (plus.adjoint() * &v)[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_shifted_diagonal() {
        let a = identity(2).scale(0.5) - matrix_unit(2, 0, 0);
        let s = eig_hermitian(&a, 1e-9).unwrap();
        assert!((s.values[0] - 0.5).abs() < 1e-12);
        assert!((s.values[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = matrix_unit(2, 0, 1);
        assert!(matches!(eig_hermitian(&a, 1e-9), Err(Error::Hermiticity(_))));
    }

    #[test]
    fn top_eigenvector_residual_is_small() {
        let a = Mat::from_fn(4, 4, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let h = symmetrize(&a);
        let s = eig_hermitian(&h, 1e-9).unwrap();
        let v = s.top_vector();
        let r = &h * &v - v.scale(s.max());
        assert!(r.norm() <= 1e-9 * hermitian_norm(&h));
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
