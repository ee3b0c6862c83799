//! Smooth losses with exact full and mini-batch gradients: multinomial
//! logistic over a weight matrix, binary logistic, and least squares, plus an
//! optional Gaussian gradient-noise injector for noise-adaptivity studies.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{dot, Matrix, Rng, Vector};

/// Labeled training data. Features are row-major N × d, labels live in
/// [0, classes).
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    classes: usize,
    name: String,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<usize>, classes: usize, name: String) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::InvalidParameter("dataset needs at least one sample".into()));
        }
        if labels.len() != features.rows() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} samples",
                labels.len(),
                features.rows()
            )));
        }
        if classes == 0 {
            return Err(Error::InvalidParameter("classes must be >= 1".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::InvalidParameter(format!("label {bad} >= classes {classes}")));
        }
        Ok(Self { features, labels, classes, name })
    }

    pub fn num_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    /// Softmax cross-entropy over a c × d weight matrix (iterate length c·d).
    MultinomialLogistic,
    /// log(1 + exp(−ỹ wᵀx)) with labels {0,1} mapped to ỹ ∈ {−1,+1}.
    BinaryLogistic,
    /// (1/2N) ‖Xw − y‖² with the integer labels read as real targets.
    LeastSquares,
}

/// How mini-batch indices are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BatchMode {
    /// Independent draws; models sampling from a distribution.
    WithReplacement,
    /// Distinct indices; models subsampling a finite sum.
    WithoutReplacement,
}

/// A smooth finite-sum objective f(x) = (1/N) Σ f_i(x).
///
/// Immutable once built; the noise generator for the injector is owned by the
/// caller and passed into `grad`. Injected noise applies to mini-batch
/// gradients only — full gradients stay exact so stationarity measures remain
/// noise-free.
#[derive(Clone, Debug)]
pub struct Objective {
    kind: LossKind,
    dataset: Arc<Dataset>,
    noise_sigma: f64,
}

impl Objective {
    pub fn new(kind: LossKind, dataset: Arc<Dataset>, noise_sigma: f64) -> Result<Self> {
        if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise_sigma {noise_sigma} must be finite and >= 0"
            )));
        }
        if kind == LossKind::BinaryLogistic && dataset.classes() != 2 {
            return Err(Error::InvalidParameter(format!(
                "binary logistic needs 2 classes, dataset has {}",
                dataset.classes()
            )));
        }
        Ok(Self { kind, dataset, noise_sigma })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Length of the iterate this objective expects.
    pub fn dim(&self) -> usize {
        match self.kind {
            LossKind::MultinomialLogistic => self.dataset.classes() * self.dataset.num_features(),
            _ => self.dataset.num_features(),
        }
    }

    fn check_shape(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "iterate length {} does not match objective dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Exact objective value over the full dataset.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        self.check_shape(x)?;
        let ds = &self.dataset;
        let n = ds.num_samples();
        let d = ds.num_features();
        let mut acc = 0.0;
        match self.kind {
            LossKind::MultinomialLogistic => {
                let c = ds.classes();
                let mut logits = vec![0.0; c];
                for i in 0..n {
                    let xi = ds.features.row(i);
                    for (l, logit) in logits.iter_mut().enumerate() {
                        *logit = dot(&x.as_slice()[l * d..(l + 1) * d], xi);
                    }
                    acc += log_sum_exp(&logits) - logits[ds.labels[i]];
                }
            }
            LossKind::BinaryLogistic => {
                for i in 0..n {
                    let z = sign_label(ds.labels[i]) * dot(x.as_slice(), ds.features.row(i));
                    acc += log1p_exp(-z);
                }
            }
            LossKind::LeastSquares => {
                for i in 0..n {
                    let r = dot(x.as_slice(), ds.features.row(i)) - ds.labels[i] as f64;
                    acc += 0.5 * r * r;
                }
            }
        }
        Ok(acc / n as f64)
    }

    /// Exact full gradient (1/N) Σ ∇f_i(x). Never carries injected noise.
    pub fn full_grad(&self, x: &Vector) -> Result<Vector> {
        self.check_shape(x)?;
        Ok(self.grad_over(x, None))
    }

    /// Mean gradient over a mini-batch, or the full gradient when `batch` is
    /// `None`. When `noise_sigma > 0` and a batch is given, adds i.i.d.
    /// N(0, noise_sigma²/dim) per coordinate so E‖noise‖² = noise_sigma².
    pub fn grad(&self, x: &Vector, batch: Option<&[usize]>, rng: &mut Rng) -> Result<Vector> {
        self.check_shape(x)?;
        if let Some(idx) = batch {
            if idx.is_empty() {
                return Err(Error::InvalidParameter("empty mini-batch".into()));
            }
            let n = self.dataset.num_samples();
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidParameter(format!("batch index {bad} >= N = {n}")));
            }
            let mut g = self.grad_over(x, Some(idx));
            if self.noise_sigma > 0.0 {
                let sd = self.noise_sigma / (g.len() as f64).sqrt();
                for gi in g.as_mut_slice() {
                    *gi += sd * rng.normal();
                }
            }
            Ok(g)
        } else {
            Ok(self.grad_over(x, None))
        }
    }

    /// One accumulation path for full and batched gradients: a batch equal to
    /// 0..N in order produces bit-identical output to the full gradient.
    fn grad_over(&self, x: &Vector, batch: Option<&[usize]>) -> Vector {
        let ds = &self.dataset;
        let d = ds.num_features();
        let count = batch.map_or(ds.num_samples(), |b| b.len());
        let mut g = vec![0.0; self.dim()];
        let mut logits = vec![0.0; ds.classes()];
        for k in 0..count {
            let i = batch.map_or(k, |b| b[k]);
            let xi = ds.features.row(i);
            match self.kind {
                LossKind::MultinomialLogistic => {
                    let c = ds.classes();
                    for (l, logit) in logits.iter_mut().enumerate() {
                        *logit = dot(&x.as_slice()[l * d..(l + 1) * d], xi);
                    }
                    let lse = log_sum_exp(&logits);
                    for l in 0..c {
                        let mut p = (logits[l] - lse).exp();
                        if l == ds.labels[i] {
                            p -= 1.0;
                        }
                        let row = &mut g[l * d..(l + 1) * d];
                        for (gj, xj) in row.iter_mut().zip(xi) {
                            *gj += p * xj;
                        }
                    }
                }
                LossKind::BinaryLogistic => {
                    let y = sign_label(ds.labels[i]);
                    let z = y * dot(x.as_slice(), xi);
                    let w = -y * sigmoid(-z);
                    for (gj, xj) in g.iter_mut().zip(xi) {
                        *gj += w * xj;
                    }
                }
                LossKind::LeastSquares => {
                    let r = dot(x.as_slice(), xi) - ds.labels[i] as f64;
                    for (gj, xj) in g.iter_mut().zip(xi) {
                        *gj += r * xj;
                    }
                }
            }
        }
        let inv = 1.0 / count as f64;
        for gi in &mut g {
            *gi *= inv;
        }
        Vector::from_vec_unchecked(g)
    }
}

/// Draws `b` indices from [0, n). `WithoutReplacement` requires b <= n and
/// yields distinct indices; b = n returns 0..n in order for either mode, so a
/// full batch reproduces the full gradient bit-for-bit.
pub fn sample_batch(rng: &mut Rng, n: usize, b: usize, mode: BatchMode) -> Result<Vec<usize>> {
    if b == 0 {
        return Err(Error::InvalidParameter("batch size must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty sample pool".into()));
    }
    if b == n {
        return Ok((0..n).collect());
    }
    match mode {
        BatchMode::WithReplacement => Ok((0..b).map(|_| rng.below(n)).collect()),
        BatchMode::WithoutReplacement => {
            if b > n {
                return Err(Error::InvalidParameter(format!(
                    "batch {b} exceeds pool {n} without replacement"
                )));
            }
            // Floyd's sampling: b distinct indices, O(b^2) worst case on the
            // membership scan, which is fine at b ~ sqrt(N).
            let mut picked: Vec<usize> = Vec::with_capacity(b);
            for i in (n - b)..n {
                let t = rng.below(i + 1);
                if picked.contains(&t) {
                    picked.push(i);
                } else {
                    picked.push(t);
                }
            }
            Ok(picked)
        }
    }
}

fn sign_label(label: usize) -> f64 {
    if label == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Max-shifted logsumexp.
fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let s: f64 = z.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// log(1 + exp(z)) without overflow.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
