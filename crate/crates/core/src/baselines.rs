//! Comparison conditional-gradient methods: four deterministic step rules
//! (open-loop, short-step with a fixed smoothness constant, heavy-ball
//! momentum, backtracking line search), two finite-sum estimators (SVRG-style
//! anchoring and SPIDER), and three expectation-setting methods (plain
//! mini-batch, one-sample EMA, one-sample STORM).
//!
//! Two conventions exist in the literature for the open-loop schedule,
//! 2/(t+1) and 2/(t+2); this implementation uses 2/(t+2), which keeps
//! η₀ = 1. All schedules are clamped to [0, 1] so iterates stay feasible.
//!
//! Traces share `TraceRecord` with the adaptive solver so plots superpose.
//! The backtracking method is the only one that queries function values; its
//! objective evaluations are charged to `grad_oracles` at N per-sample
//! evaluations each, since the shared record has no separate cost axis.

use crate::error::{Error, Result};
use crate::numerics::{PowerIterConfig, Rng, Vector};
use crate::objectives::{sample_batch, BatchMode, Objective};
use crate::schedule::step_size;
use crate::sets::{FeasibleSet, LmoWorkspace};
use crate::solver::{default_root_batch, RunOutput, RunRecorder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineMethod {
    /// η_t = 2/(t+2), exact gradients.
    OpenLoop,
    /// Quadratic-model step with a fixed smoothness constant.
    ShortStep,
    /// Heavy-ball gradient averaging with the open-loop schedule.
    Momentum,
    /// Backtracking line search with a sufficient-decrease test.
    Armijo,
    /// SVRG-style anchor refreshed every epoch, finite-sum setting.
    Svfw,
    /// SPIDER recursion with batched resets, finite-sum setting.
    SpiderCg,
    /// Plain mini-batch stochastic conditional gradient.
    Sfw,
    /// EMA estimator with decay (t+1)^(-2/3), one batch per step.
    OneSampleEma,
    /// Recursive two-batch correction with weight and step (t+1)^(-2/3).
    OneSampleStorm,
}

#[derive(Clone, Copy, Debug)]
pub struct ArmijoParams {
    pub init: f64,
    pub contraction: f64,
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
}

impl Default for ArmijoParams {
    fn default() -> Self {
        Self { init: 1.0, contraction: 0.5, sufficient_decrease: 1e-4, max_backtracks: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    pub max_iters: usize,
    pub eval_every: usize,
    pub seed: u64,
    pub power: PowerIterConfig,
    pub stop_gap: Option<f64>,
    /// Fixed smoothness constant of the short-step rule.
    pub short_step_l: f64,
    /// Heavy-ball averaging weight.
    pub momentum: f64,
    pub armijo: ArmijoParams,
    /// Anchor refresh period of the SVRG-style method.
    pub svfw_epoch: usize,
    /// Reset period of the SPIDER recursion; defaults to ⌊√N⌋.
    pub spider_q: Option<usize>,
    /// Inner-update batch of the SPIDER recursion (capped at N).
    pub spider_inner_batch: usize,
    /// Mini-batch size; defaults to ⌊√N⌋.
    pub batch: Option<usize>,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod) -> Self {
        Self {
            method,
            max_iters: 1000,
            eval_every: 10,
            seed: 0,
            power: PowerIterConfig::default(),
            stop_gap: None,
            short_step_l: 10.0,
            momentum: 0.9,
            armijo: ArmijoParams::default(),
            svfw_epoch: 50,
            spider_q: None,
            spider_inner_batch: 32,
            batch: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eval_every == 0 {
            return Err(Error::Config("eval_every must be >= 1".into()));
        }
        if !(self.short_step_l > 0.0) {
            return Err(Error::Config(format!("short-step L {} must be > 0", self.short_step_l)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!("momentum {} must lie in [0, 1)", self.momentum)));
        }
        let a = &self.armijo;
        if !(a.init > 0.0 && a.init <= 1.0) || !(a.contraction > 0.0 && a.contraction < 1.0) {
            return Err(Error::Config("armijo init must be in (0,1], contraction in (0,1)".into()));
        }
        if self.svfw_epoch == 0 || self.spider_inner_batch == 0 {
            return Err(Error::Config("epoch and batch parameters must be >= 1".into()));
        }
        if self.batch == Some(0) || self.spider_q == Some(0) {
            return Err(Error::Config("batch and q must be >= 1".into()));
        }
        Ok(())
    }
}

const LMO_FIXED_POINT_TOL: f64 = 1e-12;

/// Runs a baseline method from `x0`; the output shape matches `solver::run`.
pub fn run_baseline(
    cfg: &BaselineConfig,
    obj: &Objective,
    set: &FeasibleSet,
    x0: &Vector,
) -> Result<RunOutput> {
    cfg.validate()?;
    let n = obj.dataset().num_samples();
    let b = cfg.batch.unwrap_or_else(|| default_root_batch(n));
    let spider_q = cfg.spider_q.unwrap_or_else(|| default_root_batch(n));
    let inner_b = cfg.spider_inner_batch.min(n);

    let mut recorder = RunRecorder::new(obj, set, cfg.power, x0, cfg.stop_gap)?;
    let mut sampler = Rng::new(cfg.seed);
    let mut ws = LmoWorkspace::new(cfg.power);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    let mut g_prev = Vector::zeros(x0.len());
    let mut anchor_x = x0.clone();
    let mut anchor_g = Vector::zeros(x0.len());
    let mut grad_oracles = 0u64;
    let mut lmo_calls = 0u64;

    for t in 0..=cfg.max_iters {
        let g = match cfg.method {
            BaselineMethod::OpenLoop | BaselineMethod::ShortStep | BaselineMethod::Armijo => {
                grad_oracles += n as u64;
                obj.full_grad(&x)?
            }
            BaselineMethod::Momentum => {
                grad_oracles += n as u64;
                let full = obj.full_grad(&x)?;
                g_prev.scale(cfg.momentum).scaled_add(1.0 - cfg.momentum, &full)
            }
            BaselineMethod::Svfw => {
                if t % cfg.svfw_epoch == 0 {
                    anchor_x = x.clone();
                    grad_oracles += n as u64;
                    anchor_g = obj.full_grad(&x)?;
                    anchor_g.clone()
                } else {
                    let batch = sample_batch(&mut sampler, n, b, BatchMode::WithoutReplacement)?;
                    let g_here = obj.grad(&x, Some(&batch), &mut sampler)?;
                    let g_anchor = obj.grad(&anchor_x, Some(&batch), &mut sampler)?;
                    grad_oracles += 2 * batch.len() as u64;
                    g_here.sub(&g_anchor).scaled_add(1.0, &anchor_g)
                }
            }
            BaselineMethod::SpiderCg => {
                if t % spider_q == 0 {
                    let batch = sample_batch(&mut sampler, n, b, BatchMode::WithoutReplacement)?;
                    grad_oracles += batch.len() as u64;
                    obj.grad(&x, Some(&batch), &mut sampler)?
                } else {
                    let batch =
                        sample_batch(&mut sampler, n, inner_b, BatchMode::WithoutReplacement)?;
                    let g_here = obj.grad(&x, Some(&batch), &mut sampler)?;
                    let g_back = obj.grad(&x_prev, Some(&batch), &mut sampler)?;
                    grad_oracles += 2 * batch.len() as u64;
                    g_prev.scaled_add(1.0, &g_here).scaled_add(-1.0, &g_back)
                }
            }
            BaselineMethod::Sfw => {
                let batch = sample_batch(&mut sampler, n, b, BatchMode::WithReplacement)?;
                grad_oracles += batch.len() as u64;
                obj.grad(&x, Some(&batch), &mut sampler)?
            }
            BaselineMethod::OneSampleEma => {
                let rho_t = (t as f64 + 1.0).powf(-2.0 / 3.0);
                let batch = sample_batch(&mut sampler, n, b, BatchMode::WithReplacement)?;
                let g_here = obj.grad(&x, Some(&batch), &mut sampler)?;
                grad_oracles += batch.len() as u64;
                g_prev.scale(1.0 - rho_t).scaled_add(rho_t, &g_here)
            }
            BaselineMethod::OneSampleStorm => {
                let rho_t = (t as f64 + 1.0).powf(-2.0 / 3.0);
                let batch = sample_batch(&mut sampler, n, b, BatchMode::WithReplacement)?;
                let g_here = obj.grad(&x, Some(&batch), &mut sampler)?;
                let g_back = obj.grad(&x_prev, Some(&batch), &mut sampler)?;
                grad_oracles += 2 * batch.len() as u64;
                g_prev.sub(&g_back).scale(1.0 - rho_t).scaled_add(1.0, &g_here)
            }
        };

        let v = set.lmo(&g, &mut ws)?;
        lmo_calls += 1;

        let eta = match cfg.method {
            BaselineMethod::OpenLoop | BaselineMethod::Momentum | BaselineMethod::Sfw => {
                2.0 / (t as f64 + 2.0)
            }
            BaselineMethod::ShortStep => {
                step_size(0.0, 0.0, &g, &v, &x, cfg.short_step_l, LMO_FIXED_POINT_TOL)?
            }
            BaselineMethod::Armijo => {
                let f_x = obj.value(&x)?;
                grad_oracles += n as u64;
                let (eta, evals) = armijo_search(obj, &x, &v, &g, f_x, &cfg.armijo)?;
                grad_oracles += evals * n as u64;
                eta
            }
            BaselineMethod::Svfw | BaselineMethod::SpiderCg | BaselineMethod::OneSampleEma => {
                2.0 / (t as f64 + 1.0)
            }
            BaselineMethod::OneSampleStorm => (t as f64 + 1.0).powf(-2.0 / 3.0),
        }
        .min(1.0);

        if t % cfg.eval_every == 0 || t == cfg.max_iters {
            let (l_col, alpha_col) = trace_columns(cfg, t);
            let stop =
                recorder.record(t, &x, &g, l_col, alpha_col, Some(eta), grad_oracles, lmo_calls)?;
            if stop {
                break;
            }
        }
        if t == cfg.max_iters {
            break;
        }

        let x_next = x.convex_combination(&v, eta);
        if !x_next.is_finite() {
            return Err(Error::NonFiniteObjective { t, trace: recorder.take_trace() });
        }
        g_prev = g;
        x_prev = x;
        x = x_next;
    }

    Ok(recorder.finish())
}

/// Which model-parameter columns a method fills in its trace rows.
fn trace_columns(cfg: &BaselineConfig, t: usize) -> (Option<f64>, Option<f64>) {
    match cfg.method {
        BaselineMethod::ShortStep => (Some(cfg.short_step_l), None),
        BaselineMethod::Momentum => (None, Some(cfg.momentum)),
        BaselineMethod::OneSampleEma | BaselineMethod::OneSampleStorm => {
            (None, Some((t as f64 + 1.0).powf(-2.0 / 3.0)))
        }
        _ => (None, None),
    }
}

/// Backtracks η from `params.init` until
/// f(x + η(v−x)) <= f(x) − c·η·⟨g, x−v⟩. Returns the accepted step and the
/// number of objective evaluations spent.
fn armijo_search(
    obj: &Objective,
    x: &Vector,
    v: &Vector,
    g: &Vector,
    f_x: f64,
    params: &ArmijoParams,
) -> Result<(f64, u64)> {
    let descent = g.dot(x) - g.dot(v); // ⟨g, x − v⟩ >= 0 by LMO optimality
    let mut eta = params.init;
    let mut evals = 0u64;
    for _ in 0..=params.max_backtracks {
        let candidate = x.convex_combination(v, eta);
        let f_c = obj.value(&candidate)?;
        evals += 1;
        if f_c <= f_x - params.sufficient_decrease * eta * descent {
            return Ok((eta, evals));
        }
        eta *= params.contraction;
    }
    Err(Error::BacktrackExhausted(params.max_backtracks))
}
