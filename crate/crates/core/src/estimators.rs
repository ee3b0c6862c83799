//! Gradient estimators behind one stepping interface: exact full gradients,
//! the SPIDER recursion with periodic full-gradient resets, and two
//! momentum-based variance-reduction updates (single-batch EMA and the
//! two-batch recursive correction).

use crate::error::{Error, Result};
use crate::objectives::{sample_batch, BatchMode, Objective};
use crate::numerics::{Rng, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Exact full gradient each step.
    Full,
    /// Full gradient every `q` steps, path-difference recursion in between.
    Spider { q: usize, b: usize },
    /// g_t = (1−α_t) g_{t−1} + α_t ∇f(x_t; ξ_t); one batched gradient per step.
    Mvr1 { b: usize },
    /// g_t = (1−α_t)(g_{t−1} − ∇f(x_{t−1}; ξ_t)) + ∇f(x_t; ξ_t); two batched
    /// gradients per step, same batch at both points.
    Mvr2 { b: usize },
}

/// Per-run estimator memory: the previous estimate, the previous iterate, the
/// step counter, and the cumulative per-sample gradient-evaluation count.
#[derive(Clone, Debug)]
pub struct Estimator {
    kind: EstimatorKind,
    batch_mode: BatchMode,
    g_prev: Vector,
    x_prev: Vector,
    t: usize,
    grad_oracles: u64,
}

impl Estimator {
    /// `x0` seeds the previous-iterate slot; `g_{-1}` starts at zero.
    pub fn new(kind: EstimatorKind, batch_mode: BatchMode, x0: &Vector) -> Result<Self> {
        match kind {
            EstimatorKind::Spider { q, b } => {
                if q < 1 || b < 1 {
                    return Err(Error::Config(format!(
                        "spider needs q >= 1 and b >= 1, got q = {q}, b = {b}"
                    )));
                }
            }
            EstimatorKind::Mvr1 { b } | EstimatorKind::Mvr2 { b } => {
                if b < 1 {
                    return Err(Error::Config(format!("batch size b = {b} must be >= 1")));
                }
            }
            EstimatorKind::Full => {}
        }
        Ok(Self {
            kind,
            batch_mode,
            g_prev: Vector::zeros(x0.len()),
            x_prev: x0.clone(),
            t: 0,
            grad_oracles: 0,
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Cumulative number of per-sample gradient evaluations consumed.
    pub fn grad_oracles(&self) -> u64 {
        self.grad_oracles
    }

    /// Produces g_t for the current iterate and advances the internal state.
    /// `alpha` is the momentum weight from the step-size schedule; Full and
    /// Spider ignore it.
    pub fn estimate(
        &mut self,
        x: &Vector,
        alpha: f64,
        obj: &Objective,
        rng: &mut Rng,
    ) -> Result<Vector> {
        let n = obj.dataset().num_samples();
        let g = match self.kind {
            EstimatorKind::Full => {
                self.grad_oracles += n as u64;
                obj.full_grad(x)?
            }
            EstimatorKind::Spider { q, b } => {
                if self.t % q == 0 {
                    self.grad_oracles += n as u64;
                    obj.full_grad(x)?
                } else {
                    let batch = sample_batch(rng, n, b, self.batch_mode)?;
                    // The same batch is evaluated at both points; that pairing
                    // is what makes the error telescope.
                    let g_new = obj.grad(x, Some(&batch), rng)?;
                    let g_old = obj.grad(&self.x_prev, Some(&batch), rng)?;
                    self.grad_oracles += 2 * b as u64;
                    self.g_prev.scaled_add(1.0, &g_new).scaled_add(-1.0, &g_old)
                }
            }
            EstimatorKind::Mvr1 { b } => {
                let batch = sample_batch(rng, n, b, self.batch_mode)?;
                let g_new = obj.grad(x, Some(&batch), rng)?;
                self.grad_oracles += b as u64;
                self.g_prev.scale(1.0 - alpha).scaled_add(alpha, &g_new)
            }
            EstimatorKind::Mvr2 { b } => {
                let batch = sample_batch(rng, n, b, self.batch_mode)?;
                let g_new = obj.grad(x, Some(&batch), rng)?;
                let g_old = obj.grad(&self.x_prev, Some(&batch), rng)?;
                self.grad_oracles += 2 * b as u64;
                self.g_prev
                    .sub(&g_old)
                    .scale(1.0 - alpha)
                    .scaled_add(1.0, &g_new)
            }
        };
        self.g_prev = g.clone();
        self.x_prev = x.clone();
        self.t += 1;
        Ok(g)
    }
}
