//! Fixed matrices of the standard gate set.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{c, from_real_rows, identity, matrix_unit, Mat};

pub fn x() -> Mat {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn y() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn z() -> Mat {
    from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn h() -> Mat {
    from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale(FRAC_1_SQRT_2)
}

/// CNOT with the first qubit as control.
pub fn cx() -> Mat {
    from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn p0() -> Mat {
    matrix_unit(2, 0, 0)
}

pub fn p1() -> Mat {
    matrix_unit(2, 1, 1)
}

/// `|+⟩⟨+|`
pub fn pp() -> Mat {
    from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
}

/// `|−⟩⟨−|`
pub fn pm() -> Mat {
    from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]])
}

pub fn i2() -> Mat {
    identity(2)
}
