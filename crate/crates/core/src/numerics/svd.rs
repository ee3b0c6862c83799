//! Dense SVD for small matrices by one-sided Jacobi rotations.
//!
//! This is the slow-but-exact route: it serves as the oracle that the power
//! iteration is checked against, and as the exact nuclear-norm evaluator for
//! membership tests on small matrices. It deliberately shares no code with
//! `power`.

use super::{dot, Matrix};

const JACOBI_EPS: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Full decomposition `A = U diag(s) Vᵀ` with `s` sorted descending.
///
/// `u` is rows × k and `v` is cols × k where k = min(rows, cols). Columns of
/// `u` belonging to zero singular values are left as zeros.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

/// One-sided Jacobi SVD. Cost is O(rows · cols · min(rows, cols)) per sweep;
/// intended for small matrices only.
pub fn jacobi_svd(a: &Matrix) -> Svd {
    let transposed = a.rows() < a.cols();
    let work_src = if transposed { a.transpose() } else { a.clone() };
    let (m, n) = (work_src.rows(), work_src.cols());

    // Column-major working copy: cols[j] is the j-th column of the matrix.
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| work_src.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= JACOBI_EPS * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let bp = cols[p][i];
                    let bq = cols[q][i];
                    cols[p][i] = c * bp - s * bq;
                    cols[q][i] = s * bp + c * bq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut sigma = Vec::with_capacity(n);
    let mut u_mat = Matrix::zeros(m, n);
    let mut v_mat = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > 0.0 {
            for i in 0..m {
                u_mat.set(i, k, cols[j][i] / s);
            }
        }
        for i in 0..n {
            v_mat.set(i, k, v[j][i]);
        }
    }

    if transposed {
        Svd { u: v_mat, singular_values: sigma, v: u_mat }
    } else {
        Svd { u: u_mat, singular_values: sigma, v: v_mat }
    }
}

/// Singular values sorted descending.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    jacobi_svd(a).singular_values
}

/// Sum of singular values.
pub fn nuclear_norm(a: &Matrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a)[0]
}
