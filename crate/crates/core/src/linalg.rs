//! Dense row-major linear algebra over any [`Scalar`].
//!
//! Pivoting decisions are made on the value slot only, so jets propagate
//! derivatives of the inverse exactly.

use crate::jet::Scalar;

/// Inverse and determinant of a row-major `m × m` matrix.
///
/// Returns `None` when a pivot is exactly zero.
pub fn inverse<S: Scalar>(a: &[S], m: usize) -> Option<(Vec<S>, S)> {
    debug_assert_eq!(a.len(), m * m);
    let mut lhs = a.to_vec();
    let mut inv = identity::<S>(m);
    let mut det = S::one();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| {
                lhs[i * m + col]
                    .value()
                    .abs()
                    .total_cmp(&lhs[j * m + col].value().abs())
            })
            .unwrap();
        if lhs[piv * m + col].value() == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..m {
                lhs.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
            det = -det;
        }
        let p = lhs[col * m + col];
        det = det * p;
        for k in 0..m {
            lhs[col * m + k] = lhs[col * m + k] / p;
            inv[col * m + k] = inv[col * m + k] / p;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = lhs[r * m + col];
            if f.value() == 0.0 && S::ORDER == 0 {
                continue;
            }
            for k in 0..m {
                lhs[r * m + k] = lhs[r * m + k] - f * lhs[col * m + k];
                inv[r * m + k] = inv[r * m + k] - f * inv[col * m + k];
            }
        }
    }
    Some((inv, det))
}

pub fn identity<S: Scalar>(m: usize) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for i in 0..m {
        out[i * m + i] = S::one();
    }
    out
}

/// Row-major product of `a` (`r × k`) and `b` (`k × c`).
pub fn matmul<S: Scalar>(a: &[S], b: &[S], r: usize, k: usize, c: usize) -> Vec<S> {
    let mut out = vec![S::zero(); r * c];
    for i in 0..r {
        for j in 0..c {
            let mut s = S::zero();
            for l in 0..k {
                s = s + a[i * k + l] * b[l * c + j];
            }
            out[i * c + j] = s;
        }
    }
    out
}

pub fn transpose<S: Scalar>(a: &[S], r: usize, c: usize) -> Vec<S> {
    let mut out = vec![S::zero(); r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = a[i * c + j];
        }
    }
    out
}

pub fn matvec<S: Scalar>(a: &[S], v: &[S], m: usize) -> Vec<S> {
    let n = v.len();
    (0..m)
        .map(|i| (0..n).fold(S::zero(), |s, j| s + a[i * n + j] * v[j]))
        .collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |s, (&x, &y)| s + x * y)
}
