//! Cyclic Jacobi eigen-decomposition for small dense symmetric matrices.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

pub type Mat4 = [[f64; 4]; 4];

/// Eigenvalues in descending order with matching unit eigenvectors
/// (`vectors[k]` belongs to `values[k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: [f64; 4],
    pub vectors: [[f64; 4]; 4],
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 64;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to
/// the norm of the whole matrix.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

fn off_norm(a: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

fn frobenius(a: &Mat4) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Diagonalizes a symmetric 4x4 matrix. Only the upper triangle is trusted;
/// the input is symmetrized first.
pub fn symmetric_eigen(m: &Mat4) -> Result<SymmetricEigen> {
    if m.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let mut a = *m;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let avg = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = avg;
            a[j][i] = avg;
        }
    }
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let scale = frobenius(&a);
    let mut sweeps = 0;
    while off_norm(&a) > OFF_DIAGONAL_TOL * scale {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                // rotation angle zeroing a[p][q]
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let mut values = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (slot, &k) in order.iter().enumerate() {
        values[slot] = a[k][k];
        for r in 0..4 {
            vectors[slot][r] = v[r][k];
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

pub fn quadratic_form(m: &Mat4, w: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += w[i] * m[i][j] * w[j];
        }
    }
    s
}
