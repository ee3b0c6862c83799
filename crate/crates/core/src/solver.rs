//! The conditional-gradient driver: estimator → LMO → closed-form step →
//! convex-combination update, plus the stationarity evaluator and trace
//! collection.
//!
//! Four variants share the loop. `D` runs on exact full gradients, `Fs` on
//! the SPIDER estimator, `Mvr1`/`Mvr2` on the momentum estimators with the
//! matching weight schedules. Runs with equal configuration and seed produce
//! bit-identical traces (wall-clock timestamps aside).

use std::time::Instant;

use crate::error::{Error, Result};
use crate::estimators::{Estimator, EstimatorKind};
use crate::numerics::{PowerIterConfig, Rng, Vector};
use crate::objectives::{BatchMode, Objective};
use crate::schedule::{step_size, AdaptiveState, ScheduleVariant};
use crate::sets::{FeasibleSet, LmoWorkspace};

/// Below this ‖v − x‖ the LMO point counts as a fixed point and the step is 0.
const LMO_FIXED_POINT_TOL: f64 = 1e-12;
/// Feasibility tolerances: strict for the start point, looser for iterates
/// (convex combinations accumulate rounding).
const X0_FEASIBILITY_TOL: f64 = 1e-9;
const ITERATE_FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Deterministic: exact full gradient every step.
    D,
    /// Finite-sum: SPIDER estimator with periodic resets.
    Fs,
    /// Expectation: single-batch EMA estimator.
    Mvr1,
    /// Expectation: two-batch recursive estimator.
    Mvr2,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Scale of the smoothness accumulator; L_0 = rho.
    pub rho: f64,
    /// Additive shift in the momentum-weight accumulators.
    pub beta: f64,
    /// SPIDER reset period; defaults to ⌊√N⌋.
    pub q: Option<usize>,
    /// Mini-batch size; defaults to ⌊√N⌋.
    pub batch: Option<usize>,
    /// Number of update steps T.
    pub max_iters: usize,
    /// Trace cadence; records are appended at t ≡ 0 (mod eval_every), at
    /// t = 0 and at t = T.
    pub eval_every: usize,
    pub seed: u64,
    pub power: PowerIterConfig,
    /// Stop as soon as an evaluated gap falls at or below this value.
    pub stop_gap: Option<f64>,
}

impl SolverConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            rho: 1e-5,
            beta: 100.0,
            q: None,
            batch: None,
            max_iters: 1000,
            eval_every: 10,
            seed: 0,
            power: PowerIterConfig::default(),
            stop_gap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::Config(format!("rho {} must be finite and > 0", self.rho)));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::Config(format!("beta {} must be finite and >= 0", self.beta)));
        }
        if self.eval_every == 0 {
            return Err(Error::Config("eval_every must be >= 1".into()));
        }
        if self.q == Some(0) || self.batch == Some(0) {
            return Err(Error::Config("q and batch must be >= 1".into()));
        }
        Ok(())
    }
}

/// One evaluation row of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    /// Cumulative per-sample gradient evaluations (stationarity evaluations
    /// excluded).
    pub grad_oracles: u64,
    /// Cumulative LMO calls of the algorithm itself (stationarity evaluations
    /// excluded).
    pub lmo_calls: u64,
    /// Exact objective value F(x_t).
    pub objective: f64,
    /// Stationarity gap at x_t; uses the exact full gradient.
    pub gap: Option<f64>,
    pub l_t: Option<f64>,
    pub alpha_t: Option<f64>,
    pub eta_t: Option<f64>,
    /// ‖g_t − ∇f(x_t)‖², the estimator error at this evaluation.
    pub s_sq: Option<f64>,
    /// Nanoseconds since the run started. Not reproducible across runs.
    pub wall_ns: u64,
}

impl TraceRecord {
    /// Equality on everything except the wall clock.
    pub fn eq_ignoring_time(&self, other: &TraceRecord) -> bool {
        let key = |r: &TraceRecord| {
            (
                r.t,
                r.grad_oracles,
                r.lmo_calls,
                r.objective.to_bits(),
                r.gap.map(f64::to_bits),
                r.l_t.map(f64::to_bits),
                r.alpha_t.map(f64::to_bits),
                r.eta_t.map(f64::to_bits),
                r.s_sq.map(f64::to_bits),
            )
        };
        key(self) == key(other)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    /// The evaluated iterate with the smallest recorded gap.
    pub x_best: Vector,
    pub best_gap: f64,
    pub trace: Vec<TraceRecord>,
}

/// The convex term h of the composite objective. Fixed to zero here; the
/// step-size formula and the gap still route through these hooks so a
/// nontrivial h slots in without interface changes.
fn h_value(_x: &Vector) -> f64 {
    0.0
}

/// Generalized stationarity gap ⟨∇f(x), x − v⟩ + h(x) − h(v) with
/// v = LMO(∇f(x)). Uses the exact full gradient; never injects noise.
pub fn fw_gap(x: &Vector, obj: &Objective, set: &FeasibleSet) -> Result<f64> {
    let mut ws = LmoWorkspace::default();
    fw_gap_with(x, obj, set, &mut ws)
}

/// `fw_gap` with a caller-owned LMO workspace (warm starts persist across
/// calls within a run).
pub fn fw_gap_with(
    x: &Vector,
    obj: &Objective,
    set: &FeasibleSet,
    ws: &mut LmoWorkspace,
) -> Result<f64> {
    let grad = obj.full_grad(x)?;
    let v = set.lmo(&grad, ws)?;
    Ok(grad.dot(x) - grad.dot(&v) + h_value(x) - h_value(&v))
}

/// Shared evaluation/trace machinery for the adaptive solver and the
/// baseline methods.
pub(crate) struct RunRecorder<'a> {
    obj: &'a Objective,
    set: &'a FeasibleSet,
    eval_ws: LmoWorkspace,
    stop_gap: Option<f64>,
    start: Instant,
    trace: Vec<TraceRecord>,
    best_gap: f64,
    x_best: Vector,
}

impl<'a> RunRecorder<'a> {
    /// Validates shapes and the feasibility of the start point.
    pub(crate) fn new(
        obj: &'a Objective,
        set: &'a FeasibleSet,
        power: PowerIterConfig,
        x0: &Vector,
        stop_gap: Option<f64>,
    ) -> Result<Self> {
        let dim = obj.dim();
        if set.dim() != dim {
            return Err(Error::ShapeMismatch(format!(
                "objective dimension {dim} vs constraint dimension {}",
                set.dim()
            )));
        }
        if x0.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "start point length {} vs dimension {dim}",
                x0.len()
            )));
        }
        if set.membership_is_exact() && !set.membership(x0, X0_FEASIBILITY_TOL)? {
            return Err(Error::Infeasible("start point is outside the constraint set".into()));
        }
        Ok(Self {
            obj,
            set,
            eval_ws: LmoWorkspace::new(power),
            stop_gap,
            start: Instant::now(),
            trace: Vec::new(),
            best_gap: f64::INFINITY,
            x_best: x0.clone(),
        })
    }

    pub(crate) fn take_trace(&mut self) -> Vec<TraceRecord> {
        std::mem::take(&mut self.trace)
    }

    /// Evaluates the current iterate, appends a trace row, and reports
    /// whether the stop-gap threshold was reached.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn record(
        &mut self,
        t: usize,
        x: &Vector,
        g: &Vector,
        l_t: Option<f64>,
        alpha_t: Option<f64>,
        eta_t: Option<f64>,
        grad_oracles: u64,
        lmo_calls: u64,
    ) -> Result<bool> {
        let objective = self.obj.value(x)?;
        if !objective.is_finite() {
            return Err(Error::NonFiniteObjective { t, trace: self.take_trace() });
        }
        if self.set.membership_is_exact() && !self.set.membership(x, ITERATE_FEASIBILITY_TOL)? {
            return Err(Error::Infeasible(format!("iterate left the constraint set at t = {t}")));
        }
        let full = self.obj.full_grad(x)?;
        let v = self.set.lmo(&full, &mut self.eval_ws)?;
        let gap = full.dot(x) - full.dot(&v) + h_value(x) - h_value(&v);
        let s_sq = {
            let d = g.sub(&full);
            d.dot(&d)
        };
        self.trace.push(TraceRecord {
            t,
            grad_oracles,
            lmo_calls,
            objective,
            gap: Some(gap),
            l_t,
            alpha_t,
            eta_t,
            s_sq: Some(s_sq),
            wall_ns: self.start.elapsed().as_nanos() as u64,
        });
        if gap < self.best_gap {
            self.best_gap = gap;
            self.x_best = x.clone();
        }
        Ok(self.stop_gap.is_some_and(|limit| gap <= limit))
    }

    pub(crate) fn finish(self) -> RunOutput {
        RunOutput { x_best: self.x_best, best_gap: self.best_gap, trace: self.trace }
    }
}

pub(crate) fn default_root_batch(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

/// Runs the adaptive solver for `cfg.max_iters` steps from `x0` and returns
/// the best evaluated iterate together with the trace.
pub fn run(cfg: &SolverConfig, obj: &Objective, set: &FeasibleSet, x0: &Vector) -> Result<RunOutput> {
    cfg.validate()?;
    let n = obj.dataset().num_samples();
    let b = cfg.batch.unwrap_or_else(|| default_root_batch(n));
    let q = cfg.q.unwrap_or_else(|| default_root_batch(n));
    let (kind, mode, sched) = match cfg.variant {
        Variant::D => (EstimatorKind::Full, BatchMode::WithoutReplacement, ScheduleVariant::FiniteSum),
        Variant::Fs => (
            EstimatorKind::Spider { q, b },
            BatchMode::WithoutReplacement,
            ScheduleVariant::FiniteSum,
        ),
        Variant::Mvr1 => (EstimatorKind::Mvr1 { b }, BatchMode::WithReplacement, ScheduleVariant::Mvr1),
        Variant::Mvr2 => (EstimatorKind::Mvr2 { b }, BatchMode::WithReplacement, ScheduleVariant::Mvr2),
    };

    let mut recorder = RunRecorder::new(obj, set, cfg.power, x0, cfg.stop_gap)?;
    let mut estimator = Estimator::new(kind, mode, x0)?;
    let mut schedule = AdaptiveState::new(sched, cfg.rho, cfg.beta)?;
    let mut sampler = Rng::new(cfg.seed);
    let mut step_ws = LmoWorkspace::new(cfg.power);
    let mut x = x0.clone();
    let mut lmo_calls = 0u64;

    for t in 0..=cfg.max_iters {
        let (l_t, alpha_t) = schedule.next_l_and_alpha();
        let g = estimator.estimate(&x, alpha_t, obj, &mut sampler)?;
        let v = set.lmo(&g, &mut step_ws)?;
        lmo_calls += 1;
        let eta = step_size(h_value(&x), h_value(&v), &g, &v, &x, l_t, LMO_FIXED_POINT_TOL)?;

        if t % cfg.eval_every == 0 || t == cfg.max_iters {
            let stop = recorder.record(
                t,
                &x,
                &g,
                Some(l_t),
                Some(alpha_t),
                Some(eta),
                estimator.grad_oracles(),
                lmo_calls,
            )?;
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
        schedule.record_step(x.dist2(&x_next))?;
        x = x_next;
    }

    Ok(recorder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::objectives::{Dataset, LossKind};
    use std::sync::Arc;

    fn least_squares_2d() -> Objective {
        // X = [[2,0],[0,4]], y = (1,1): minimizer (0.5, 0.25), strictly inside
        // the unit l1 ball.
        let feats = Matrix::from_vec(vec![2.0, 0.0, 0.0, 4.0], 2, 2).unwrap();
        let ds = Arc::new(Dataset::new(feats, vec![1, 1], 2, "ls2".into()).unwrap());
        Objective::new(LossKind::LeastSquares, ds, 0.0).unwrap()
    }

    fn multinomial_small(seed: u64) -> Objective {
        let mut rng = Rng::new(seed);
        let (n, d, c) = (30, 6, 3);
        let feats: Vec<f64> = (0..n * d).map(|_| rng.normal()).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.below(c)).collect();
        let ds = Arc::new(
            Dataset::new(Matrix::from_vec(feats, n, d).unwrap(), labels, c, "mn".into()).unwrap(),
        );
        Objective::new(LossKind::MultinomialLogistic, ds, 0.0).unwrap()
    }

    #[test]
    fn zero_iterations_still_record_the_start() {
        let obj = least_squares_2d();
        let set = FeasibleSet::l1_ball(1.0, 2).unwrap();
        let mut cfg = SolverConfig::new(Variant::D);
        cfg.max_iters = 0;
        cfg.rho = 1.0;
        let out = run(&cfg, &obj, &set, &Vector::zeros(2)).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].t, 0);
        let g0 = fw_gap(&Vector::zeros(2), &obj, &set).unwrap();
        assert_eq!(out.trace[0].gap.unwrap(), g0);
    }

    #[test]
    fn interior_least_squares_reaches_tiny_gap() {
        let obj = least_squares_2d();
        let set = FeasibleSet::l1_ball(1.0, 2).unwrap();
        let mut cfg = SolverConfig::new(Variant::D);
        cfg.rho = 1.0;
        cfg.max_iters = 2000;
        cfg.eval_every = 25;
        let out = run(&cfg, &obj, &set, &Vector::zeros(2)).unwrap();
        assert!(out.best_gap <= 1e-6, "best gap {}", out.best_gap);
        // exact solution check: gap bounds suboptimality for convex f
        let w = &out.x_best;
        assert!((w[0] - 0.5).abs() < 1e-3 && (w[1] - 0.25).abs() < 1e-3);
    }

    #[test]
    fn gap_is_zero_at_stationary_point() {
        let obj = least_squares_2d();
        let set = FeasibleSet::l1_ball(1.0, 2).unwrap();
        // gradient vanishes at the interpolating point
        let x = Vector::from_vec(vec![0.5, 0.25]).unwrap();
        let gap = fw_gap(&x, &obj, &set).unwrap();
        assert!(gap.abs() < 1e-12, "gap {gap}");
    }

    #[test]
    fn traces_are_deterministic_per_seed() {
        let obj = multinomial_small(41);
        let set = FeasibleSet::nuclear_ball(2.0, 3, 6).unwrap();
        let mut cfg = SolverConfig::new(Variant::Mvr2);
        cfg.max_iters = 60;
        cfg.eval_every = 10;
        cfg.seed = 7;
        cfg.batch = Some(4);
        let a = run(&cfg, &obj, &set, &Vector::zeros(18)).unwrap();
        let b = run(&cfg, &obj, &set, &Vector::zeros(18)).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert!(ra.eq_ignoring_time(rb));
        }
        cfg.seed = 8;
        let c = run(&cfg, &obj, &set, &Vector::zeros(18)).unwrap();
        assert!(a.trace.iter().zip(&c.trace).any(|(x, y)| !x.eq_ignoring_time(y)));
    }

    #[test]
    fn spider_full_batch_period_one_matches_deterministic() {
        let obj = multinomial_small(42);
        let set = FeasibleSet::nuclear_ball(2.0, 3, 6).unwrap();
        let mut cfg_d = SolverConfig::new(Variant::D);
        cfg_d.max_iters = 40;
        cfg_d.eval_every = 5;
        let mut cfg_fs = SolverConfig::new(Variant::Fs);
        cfg_fs.max_iters = 40;
        cfg_fs.eval_every = 5;
        cfg_fs.q = Some(1);
        cfg_fs.batch = Some(30);
        let a = run(&cfg_d, &obj, &set, &Vector::zeros(18)).unwrap();
        let b = run(&cfg_fs, &obj, &set, &Vector::zeros(18)).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert!(ra.eq_ignoring_time(rb), "t = {}", ra.t);
        }
    }

    #[test]
    fn evaluated_gaps_stay_nonnegative_and_feasible() {
        let obj = multinomial_small(43);
        let set = FeasibleSet::nuclear_ball(1.5, 3, 6).unwrap();
        for variant in [Variant::D, Variant::Fs, Variant::Mvr1, Variant::Mvr2] {
            let mut cfg = SolverConfig::new(variant);
            cfg.max_iters = 50;
            cfg.eval_every = 5;
            cfg.batch = Some(5);
            cfg.seed = 3;
            let out = run(&cfg, &obj, &set, &Vector::zeros(18)).unwrap();
            for r in &out.trace {
                assert!(r.gap.unwrap() >= -1e-9);
                assert!(r.objective.is_finite());
            }
            assert!(set.membership(&out.x_best, 1e-8).unwrap());
        }
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let obj = least_squares_2d();
        let set = FeasibleSet::l1_ball(1.0, 2).unwrap();
        let cfg = SolverConfig::new(Variant::D);
        let far = Vector::from_vec(vec![3.0, 3.0]).unwrap();
        assert!(matches!(run(&cfg, &obj, &set, &far), Err(Error::Infeasible(_))));
    }

    #[test]
    fn stop_gap_exits_early() {
        let obj = least_squares_2d();
        let set = FeasibleSet::l1_ball(1.0, 2).unwrap();
        let mut cfg = SolverConfig::new(Variant::D);
        cfg.rho = 1.0;
        cfg.max_iters = 5000;
        cfg.eval_every = 10;
        cfg.stop_gap = Some(1e-4);
        let out = run(&cfg, &obj, &set, &Vector::zeros(2)).unwrap();
        let last = out.trace.last().unwrap();
        assert!(last.t < 5000, "should stop before the budget");
        assert!(last.gap.unwrap() <= 1e-4);
    }

    #[test]
    fn oracle_accounting_cross_check() {
        let obj = multinomial_small(44);
        let n = 30u64;
        let set = FeasibleSet::nuclear_ball(2.0, 3, 6).unwrap();
        let mut cfg = SolverConfig::new(Variant::Fs);
        cfg.max_iters = 12;
        cfg.eval_every = 3;
        cfg.q = Some(4);
        cfg.batch = Some(5);
        let out = run(&cfg, &obj, &set, &Vector::zeros(18)).unwrap();
        // independent count: resets at t ∈ {0,4,8,12} cost N, others 2b
        for r in &out.trace {
            let steps = r.t + 1; // estimates produced through iteration t
            let resets = (r.t / 4) + 1;
            let want = resets as u64 * n + (steps - resets) as u64 * 10;
            assert_eq!(r.grad_oracles, want, "t = {}", r.t);
            assert_eq!(r.lmo_calls, steps as u64);
        }
    }
}
