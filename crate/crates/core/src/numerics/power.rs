use super::{dot, Matrix, Rng, Vector};
use crate::error::{Error, Result};

/// Settings for the power iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIterConfig {
    /// Relative change of the singular-value estimate that counts as converged.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIterConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100 }
    }
}

/// Result of a top-singular-pair computation: `sigma >= 0`, `u` and `v` unit
/// vectors with `uᵀ M v = sigma`.
#[derive(Clone, Debug)]
pub struct SingularPair {
    pub sigma: f64,
    pub u: Vector,
    pub v: Vector,
    /// False when `max_iter` ran out before the tolerance was met; the pair is
    /// still the best found.
    pub converged: bool,
}

/// Top singular pair of a dense matrix by alternating power iteration on
/// `MᵀM`.
///
/// Starts from `warm_start` when given (and of the right length), otherwise
/// from a random unit vector drawn from `rng`. For matrices with a spectral
/// gap this converges linearly at rate (σ₂/σ₁)².
pub fn top_singular_pair(
    m: &Matrix,
    cfg: &PowerIterConfig,
    warm_start: Option<&[f64]>,
    rng: &mut Rng,
) -> Result<SingularPair> {
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("power tol = {} must be > 0", cfg.tol)));
    }
    if m.max_abs() == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let (rows, cols) = (m.rows(), m.cols());

    let mut v: Vec<f64> = match warm_start {
        Some(w) if w.len() == cols && dot(w, w) > 1e-30 => {
            let norm = dot(w, w).sqrt();
            w.iter().map(|x| x / norm).collect()
        }
        _ => rng.unit_vector(cols),
    };

    let mut u = vec![0.0; rows];
    let mut w = vec![0.0; cols];
    let mut sigma_prev = f64::NAN;
    let mut converged = false;

    for _ in 0..cfg.max_iter {
        m.matvec(&v, &mut u);
        let sigma = dot(&u, &u).sqrt();
        if sigma == 0.0 {
            // v landed in the null space; restart from a fresh direction.
            v = rng.unit_vector(cols);
            sigma_prev = f64::NAN;
            continue;
        }
        m.tr_matvec(&u, &mut w);
        let wn = dot(&w, &w).sqrt();
        if wn == 0.0 {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if sigma_prev.is_finite() && (sigma - sigma_prev).abs() <= cfg.tol * sigma {
            converged = true;
            break;
        }
        sigma_prev = sigma;
    }

    // Final pass so that (sigma, u, v) are mutually consistent.
    m.matvec(&v, &mut u);
    let sigma = dot(&u, &u).sqrt();
    if sigma > 0.0 {
        for x in &mut u {
            *x /= sigma;
        }
    }

    Ok(SingularPair {
        sigma,
        u: Vector::from_vec_unchecked(u),
        v: Vector::from_vec_unchecked(v),
        converged,
    })
}
