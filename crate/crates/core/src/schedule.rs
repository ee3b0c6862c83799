//! The adaptive, line-search-free step machinery: a self-normalized
//! accumulator of scaled iterate differences that estimates local smoothness,
//! the momentum-weight schedules for the two variance-reduced variants, and
//! the closed-form quadratic-model step size.
//!
//! Writing δ_i = L_i ‖x_{i+1} − x_i‖ for the scaled step at iteration i, the
//! schedule maintains A = Σ δ_i², S = Σ (β + δ_i²), and M = max (β + δ_i²),
//! and issues
//!
//! ```text
//! finite-sum:  L_t = ρ (1 + A)^(1/2)
//! mvr1:        α_t = (1 + S)^(-1/2),            L_t = ρ (1 + A)^(1/2) α_t^(-1/2)
//! mvr2:        α̂_t = ((1 + M)/(1 + S))^(2/3),   α_t = min_{j<=t} α̂_j,
//!              L_t = ρ (1 + A)^(1/2) α_t^(-1/4)
//! ```
//!
//! The finite-sum L obeys the exact recursion L_{t+1}² = L_t² (1 + ρ²‖Δ_t‖²),
//! and the mvr2 weights satisfy 0 <= 1/α_{t+1} − 1/α_t <= 2/3.

use crate::error::{Error, Result};
use crate::numerics::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleVariant {
    /// Shared by the deterministic and finite-sum solvers.
    FiniteSum,
    Mvr1,
    Mvr2,
}

/// Running accumulators of one solver run. Single-owner: exactly one loop
/// alternates `next_l_and_alpha` / `record_step`.
#[derive(Clone, Debug)]
pub struct AdaptiveState {
    variant: ScheduleVariant,
    rho: f64,
    beta: f64,
    /// A = Σ δ_i².
    sum_delta_sq: f64,
    /// S = Σ (β + δ_i²).
    sum_shifted: f64,
    /// M = max (β + δ_i²); zero while no step is recorded.
    max_shifted: f64,
    /// Running min of the α̂_j issued so far (mvr2).
    alpha_floor: f64,
    /// L_t issued by the last `next_l_and_alpha`; `record_step` scales the
    /// step with it.
    current_l: f64,
    current_alpha: f64,
    steps: usize,
}

impl AdaptiveState {
    pub fn new(variant: ScheduleVariant, rho: f64, beta: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho {rho} must be finite and > 0")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta {beta} must be finite and >= 0")));
        }
        Ok(Self {
            variant,
            rho,
            beta,
            sum_delta_sq: 0.0,
            sum_shifted: 0.0,
            max_shifted: 0.0,
            alpha_floor: 1.0,
            current_l: rho,
            current_alpha: 1.0,
            steps: 0,
        })
    }

    pub fn variant(&self) -> ScheduleVariant {
        self.variant
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn current_l(&self) -> f64 {
        self.current_l
    }

    pub fn current_alpha(&self) -> f64 {
        self.current_alpha
    }

    /// Σ δ_i² over the recorded steps.
    pub fn sum_delta_sq(&self) -> f64 {
        self.sum_delta_sq
    }

    /// Issues (L_t, α_t) for the upcoming iteration. With empty accumulators
    /// this returns (ρ, 1) for every variant.
    pub fn next_l_and_alpha(&mut self) -> (f64, f64) {
        let growth = (1.0 + self.sum_delta_sq).sqrt();
        let (l, alpha) = match self.variant {
            ScheduleVariant::FiniteSum => (self.rho * growth, 1.0),
            ScheduleVariant::Mvr1 => {
                let alpha = (1.0 + self.sum_shifted).powf(-0.5);
                (self.rho * growth * alpha.powf(-0.5), alpha)
            }
            ScheduleVariant::Mvr2 => {
                let hat = ((1.0 + self.max_shifted) / (1.0 + self.sum_shifted)).powf(2.0 / 3.0);
                let alpha = hat.min(self.alpha_floor);
                self.alpha_floor = alpha;
                (self.rho * growth * alpha.powf(-0.25), alpha)
            }
        };
        self.current_l = l;
        self.current_alpha = alpha;
        (l, alpha)
    }

    /// Records ‖x_{t+1} − x_t‖ for the step taken with the last issued L_t.
    pub fn record_step(&mut self, step_norm: f64) -> Result<()> {
        if !(step_norm >= 0.0) || !step_norm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step norm {step_norm} must be finite and >= 0"
            )));
        }
        let delta = self.current_l * step_norm;
        let delta_sq = delta * delta;
        self.sum_delta_sq += delta_sq;
        self.sum_shifted += self.beta + delta_sq;
        self.max_shifted = self.max_shifted.max(self.beta + delta_sq);
        self.steps += 1;
        Ok(())
    }
}

/// Closed-form step of the quadratic upper model:
///
/// ```text
/// η = min( (h(x) − h(v) − ⟨g, v − x⟩) / (L ‖v − x‖²), 1 )
/// ```
///
/// clamped to [0, 1]. When ‖v − x‖ <= tol the LMO point coincides with the
/// iterate and the step is 0 (the formula is 0/0 there). A numerator below
/// −tol·(1 + |num|) contradicts LMO optimality and is reported through `log`;
/// the clamp at 0 keeps the update feasible either way.
pub fn step_size(
    h_x: f64,
    h_v: f64,
    g: &Vector,
    v: &Vector,
    x: &Vector,
    l_t: f64,
    tol: f64,
) -> Result<f64> {
    if !(l_t > 0.0) {
        return Err(Error::InvalidParameter(format!("L = {l_t} must be > 0")));
    }
    debug_assert_eq!(g.len(), v.len());
    debug_assert_eq!(g.len(), x.len());
    let mut dist_sq = 0.0;
    let mut inner = 0.0;
    for i in 0..g.len() {
        let d = v[i] - x[i];
        dist_sq += d * d;
        inner += g[i] * d;
    }
    if dist_sq.sqrt() <= tol {
        return Ok(0.0);
    }
    let num = h_x - h_v - inner;
    if num < -tol * (1.0 + num.abs()) {
        log::warn!("step-size numerator {num} is negative; LMO optimality is violated numerically");
    }
    Ok((num.max(0.0) / (l_t * dist_sq)).min(1.0))
}
