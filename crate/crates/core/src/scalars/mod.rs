//! Exact number-field arithmetic and certified intervals.

mod field;
mod interval;

pub use field::{set_sign_start_bits, FieldScalar, Sign, RADICANDS};
pub use interval::CertifiedInterval;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse field element from {0:?}")]
    Parse(String),
}

/// Symmetric matrices and vectors over the field.
pub type Matrix = Vec<Vec<FieldScalar>>;

pub fn dot(a: &[FieldScalar], b: &[FieldScalar]) -> FieldScalar {
    let mut acc = FieldScalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// `m · v`.
pub fn mat_vec(m: &Matrix, v: &[FieldScalar]) -> Vec<FieldScalar> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `aᵀ · m · b`.
pub fn bilinear(m: &Matrix, a: &[FieldScalar], b: &[FieldScalar]) -> FieldScalar {
    dot(a, &mat_vec(m, b))
}

/// Exact inverse by Gauss-Jordan elimination; `None` if singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { FieldScalar::one() } else { FieldScalar::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inverse().ok()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                if !a[col][j].is_zero() {
                    let t = &f * &a[col][j];
                    a[r][j] -= &t;
                }
                if !inv[col][j].is_zero() {
                    let t = &f * &inv[col][j];
                    inv[r][j] -= &t;
                }
            }
        }
    }
    Some(inv)
}

/// Inertia (positive, negative, zero) of a symmetric matrix by exact
/// symmetric elimination.
pub fn inertia(m: &Matrix) -> (usize, usize, usize) {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !active.is_empty() {
        if let Some(k) = active.iter().position(|&i| !a[i][i].is_zero()) {
            let p = active.remove(k);
            let piv = a[p][p].clone();
            match piv.sign() {
                Sign::Positive => pos += 1,
                Sign::Negative => neg += 1,
                Sign::Zero => unreachable!(),
            }
            let inv = piv.inverse().expect("nonzero pivot");
            let col: Vec<FieldScalar> = active.iter().map(|&i| a[i][p].clone()).collect();
            for (x, &i) in active.iter().enumerate() {
                if col[x].is_zero() {
                    continue;
                }
                let f = &col[x] * &inv;
                for (y, &j) in active.iter().enumerate() {
                    if !col[y].is_zero() {
                        let t = &f * &col[y];
                        a[i][j] -= &t;
                    }
                }
            }
            continue;
        }
        // All remaining diagonal entries vanish: pair off a nonzero
        // off-diagonal entry, which contributes one positive and one
        // negative direction.
        let found = active.iter().enumerate().find_map(|(x, &i)| {
            active[x + 1..].iter().find(|&&j| !a[i][j].is_zero()).map(|&j| (i, j))
        });
        let Some((i, j)) = found else {
            break;
        };
        // Replace row/column i by i + j, making the diagonal 2·a_ij ≠ 0.
        let aij = a[i][j].clone();
        for &k in &active {
            let t = a[j][k].clone();
            a[i][k] += &t;
        }
        for &k in &active {
            let t = a[k][j].clone();
            a[k][i] += &t;
        }
        debug_assert_eq!(a[i][i], &aij + &aij);
    }
    let zero = n - pos - neg;
    (pos, neg, zero)
}
