//! Constraint-set oracles: linear minimization, diameter, and membership for
//! the nuclear-norm ball and ℓp balls, with the ℓ1 ball as a vertex-LMO
//! special case.
//!
//! The LMO solves `min_{v ∈ X} ⟨d, v⟩` (the convex part h of the composite
//! objective is fixed to zero throughout, so it does not enter the oracle).

use crate::error::{Error, Result};
use crate::numerics::{self, svd, top_singular_pair, Matrix, PowerIterConfig, Rng, Vector};

/// Nuclear-norm membership switches from the exact Jacobi route to a bound
/// check above this entry count.
const EXACT_NUCLEAR_LIMIT: usize = 10_000;

/// A compact convex constraint set with LMO access.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    /// Matrices with `‖X‖_* <= radius`, viewed as flat vectors of length
    /// rows · cols (row-major).
    NuclearBall { radius: f64, rows: usize, cols: usize },
    /// Vectors with `‖x‖_p <= radius`, `p > 1` strictly.
    LpBall { radius: f64, p: f64, dim: usize },
    /// Vectors with `‖x‖_1 <= radius`.
    L1Ball { radius: f64, dim: usize },
}

impl FeasibleSet {
    pub fn nuclear_ball(radius: f64, rows: usize, cols: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius {radius} must be > 0")));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("matrix shape must be nonzero".into()));
        }
        Ok(Self::NuclearBall { radius, rows, cols })
    }

    pub fn lp_ball(radius: f64, p: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius {radius} must be > 0")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("lp exponent {p} must be finite and > 1")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be nonzero".into()));
        }
        Ok(Self::LpBall { radius, p, dim })
    }

    pub fn l1_ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius {radius} must be > 0")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be nonzero".into()));
        }
        Ok(Self::L1Ball { radius, dim })
    }

    /// Length of the flat iterate this set constrains.
    pub fn dim(&self) -> usize {
        match *self {
            Self::NuclearBall { rows, cols, .. } => rows * cols,
            Self::LpBall { dim, .. } | Self::L1Ball { dim, .. } => dim,
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            Self::NuclearBall { radius, .. }
            | Self::LpBall { radius, .. }
            | Self::L1Ball { radius, .. } => radius,
        }
    }

    /// Euclidean diameter sup ‖x − y‖₂.
    ///
    /// Nuclear ball: extreme points are rank-1 with Frobenius norm = radius,
    /// so the Frobenius diameter is 2·radius. ℓp with p >= 2: antipodal
    /// points give 2·radius. ℓp with 1 < p < 2: the ℓ2 ball of radius
    /// `r · n^(1/p − 1/2)` circumscribes, attained at the diagonal corners.
    pub fn diameter(&self) -> f64 {
        match *self {
            Self::NuclearBall { radius, .. } => 2.0 * radius,
            Self::LpBall { radius, p, dim } => {
                if p >= 2.0 {
                    2.0 * radius
                } else {
                    2.0 * radius * (dim as f64).powf(1.0 / p - 0.5)
                }
            }
            Self::L1Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// The norm the set constrains, evaluated at `x`.
    pub fn constraint_norm(&self, x: &Vector) -> Result<f64> {
        self.check_len(x.len())?;
        match *self {
            Self::NuclearBall { rows, cols, .. } => {
                let m = Matrix::from_vec_unchecked(x.as_slice().to_vec(), rows, cols);
                Ok(svd::nuclear_norm(&m))
            }
            Self::LpBall { p, .. } => numerics::lp_norm(x.as_slice(), p),
            Self::L1Ball { .. } => numerics::lp_norm(x.as_slice(), 1.0),
        }
    }

    /// True iff the constraint norm of `x` is at most `radius · (1 + tol)`.
    ///
    /// For nuclear balls with more than 10⁴ entries the exact SVD is skipped:
    /// the verdict falls back to the sandwich `‖X‖_F <= ‖X‖_* <= √rank ‖X‖_F`
    /// and is conservative (may report false for feasible points near the
    /// boundary).
    pub fn membership(&self, x: &Vector, tol: f64) -> Result<bool> {
        self.check_len(x.len())?;
        let limit = self.radius() * (1.0 + tol);
        match *self {
            Self::NuclearBall { rows, cols, .. } => {
                let frob = numerics::dot(x.as_slice(), x.as_slice()).sqrt();
                if frob > limit {
                    return Ok(false); // ‖X‖_* >= ‖X‖_F
                }
                let max_rank = rows.min(cols) as f64;
                if max_rank.sqrt() * frob <= limit {
                    return Ok(true); // ‖X‖_* <= √rank ‖X‖_F
                }
                if rows * cols <= EXACT_NUCLEAR_LIMIT {
                    let m = Matrix::from_vec_unchecked(x.as_slice().to_vec(), rows, cols);
                    Ok(svd::nuclear_norm(&m) <= limit)
                } else {
                    Ok(false)
                }
            }
            _ => Ok(self.constraint_norm(x)? <= limit),
        }
    }

    /// Whether `membership` gives an exact verdict for this set.
    pub fn membership_is_exact(&self) -> bool {
        match *self {
            Self::NuclearBall { rows, cols, .. } => rows * cols <= EXACT_NUCLEAR_LIMIT,
            _ => true,
        }
    }

    /// Linear minimization oracle: a minimizer of `⟨d, v⟩` over the set.
    ///
    /// Closed forms: the ℓp ball uses Hölder duality with q = p/(p−1); the ℓ1
    /// ball returns the signed vertex of the largest |d_i| (smallest index on
    /// ties); the nuclear ball returns `−radius · u vᵀ` from the top singular
    /// pair of `d` reshaped to rows × cols. A zero direction returns the zero
    /// vector (every feasible point is optimal; zero keeps runs
    /// deterministic).
    pub fn lmo(&self, d: &Vector, ws: &mut LmoWorkspace) -> Result<Vector> {
        self.check_len(d.len())?;
        let max_abs = d.as_slice().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if max_abs == 0.0 {
            return Ok(Vector::zeros(d.len()));
        }
        match *self {
            Self::LpBall { radius, p, .. } => {
                let q = p / (p - 1.0);
                // v_i = -r sign(d_i) |d_i|^(q-1) / ‖d‖_q^(q-1); entries are
                // scaled by max|d| first, which cancels exactly.
                let mut denom = 0.0;
                for x in d.as_slice() {
                    denom += (x.abs() / max_abs).powf(q);
                }
                let denom = denom.powf((q - 1.0) / q);
                let out = d
                    .as_slice()
                    .iter()
                    .map(|&x| {
                        if x == 0.0 {
                            0.0
                        } else {
                            -radius * x.signum() * (x.abs() / max_abs).powf(q - 1.0) / denom
                        }
                    })
                    .collect();
                Ok(Vector::from_vec_unchecked(out))
            }
            Self::L1Ball { radius, .. } => {
                let mut best = 0usize;
                for (i, x) in d.as_slice().iter().enumerate() {
                    if x.abs() > d[best].abs() {
                        best = i;
                    }
                }
                let mut out = vec![0.0; d.len()];
                out[best] = -radius * d[best].signum();
                Ok(Vector::from_vec_unchecked(out))
            }
            Self::NuclearBall { radius, rows, cols } => {
                let m = Matrix::from_vec_unchecked(d.as_slice().to_vec(), rows, cols);
                let pair = top_singular_pair(&m, &ws.power, ws.warm_start.as_deref(), &mut ws.rng)?;
                ws.warm_start = Some(pair.v.as_slice().to_vec());
                let mut out = vec![0.0; rows * cols];
                for r in 0..rows {
                    let ur = -radius * pair.u[r];
                    for c in 0..cols {
                        out[r * cols + c] = ur * pair.v[c];
                    }
                }
                Ok(Vector::from_vec_unchecked(out))
            }
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector length {len} does not match set dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Caller-owned LMO scratch state: power-iteration settings, the warm-start
/// singular vector carried between nuclear-ball calls, and the generator that
/// seeds cold starts.
///
/// The cold-start generator uses a fixed internal seed on purpose: the LMO is
/// part of the deterministic oracle surface, so its output must not depend on
/// the run seed that drives mini-batch sampling.
#[derive(Clone, Debug)]
pub struct LmoWorkspace {
    pub power: PowerIterConfig,
    warm_start: Option<Vec<f64>>,
    rng: Rng,
}

const LMO_INIT_SEED: u64 = 0x51C6_E5A3_7D18_90F4;

impl LmoWorkspace {
    pub fn new(power: PowerIterConfig) -> Self {
        Self { power, warm_start: None, rng: Rng::new(LMO_INIT_SEED) }
    }

    pub fn clear_warm_start(&mut self) {
        self.warm_start = None;
    }
}

impl Default for LmoWorkspace {
    fn default() -> Self {
        Self::new(PowerIterConfig::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dot;

    fn ws() -> LmoWorkspace {
        LmoWorkspace::default()
    }

    #[test]
    fn lp_single_coordinate_direction() {
        let set = FeasibleSet::lp_ball(1.0, 3.0, 3).unwrap();
        let d = Vector::from_vec(vec![2.0, 0.0, 0.0]).unwrap();
        let v = set.lmo(&d, &mut ws()).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15);
        assert_eq!(v[1], 0.0);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn lp_two_equal_coordinates() {
        let set = FeasibleSet::lp_ball(1.0, 3.0, 3).unwrap();
        let d = Vector::from_vec(vec![1.0, 1.0, 0.0]).unwrap();
        let v = set.lmo(&d, &mut ws()).unwrap();
        let want = -(2.0_f64.powf(-1.0 / 3.0));
        assert!((v[0] - want).abs() < 1e-12, "{} vs {want}", v[0]);
        assert!((v[1] - want).abs() < 1e-12);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn lp_duality_identity() {
        let set = FeasibleSet::lp_ball(2.5, 3.0, 7);
        let set = set.unwrap();
        let mut rng = Rng::new(21);
        for _ in 0..200 {
            let d = Vector::from_vec((0..7).map(|_| rng.normal() * 3.0).collect()).unwrap();
            let v = set.lmo(&d, &mut ws()).unwrap();
            let q = 3.0 / 2.0;
            let dq = numerics::lp_norm(d.as_slice(), q).unwrap();
            let obj = dot(d.as_slice(), v.as_slice());
            assert!((obj + 2.5 * dq).abs() <= 1e-12 * (2.5 * dq), "obj {obj} vs {}", -2.5 * dq);
            let vp = numerics::lp_norm(v.as_slice(), 3.0).unwrap();
            assert!((vp - 2.5).abs() <= 1e-12 * 2.5);
        }
    }

    #[test]
    fn lp_scale_equivariance() {
        let set = FeasibleSet::lp_ball(1.0, 3.0, 5).unwrap();
        let mut rng = Rng::new(22);
        for _ in 0..50 {
            let d = Vector::from_vec((0..5).map(|_| rng.normal()).collect()).unwrap();
            let v1 = set.lmo(&d, &mut ws()).unwrap();
            let v2 = set.lmo(&d.scale(37.5), &mut ws()).unwrap();
            for i in 0..5 {
                assert!((v1[i] - v2[i]).abs() <= 1e-12 * v1[i].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn l1_vertex_and_tie_break() {
        let set = FeasibleSet::l1_ball(2.0, 4).unwrap();
        let d = Vector::from_vec(vec![1.0, -3.0, 3.0, 0.0]).unwrap();
        let v = set.lmo(&d, &mut ws()).unwrap();
        // |d_1| == |d_2|; the smaller index wins.
        assert_eq!(v.as_slice(), &[0.0, 2.0, 0.0, 0.0]);
        // scale equivariance is exact for the vertex oracle
        let v2 = set.lmo(&d.scale(10.0), &mut ws()).unwrap();
        assert_eq!(v.as_slice(), v2.as_slice());
    }

    #[test]
    fn zero_direction_returns_zero() {
        for set in [
            FeasibleSet::l1_ball(1.0, 3).unwrap(),
            FeasibleSet::lp_ball(1.0, 3.0, 3).unwrap(),
            FeasibleSet::nuclear_ball(1.0, 3, 1).unwrap(),
        ] {
            let v = set.lmo(&Vector::zeros(3), &mut ws()).unwrap();
            assert!(v.as_slice().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn nuclear_permutation_scaled_example() {
        let set = FeasibleSet::nuclear_ball(2.0, 2, 2).unwrap();
        let d = Vector::from_vec(vec![0.0, 2.0, 1.0, 0.0]).unwrap();
        let v = set.lmo(&d, &mut ws()).unwrap();
        let obj = dot(d.as_slice(), v.as_slice());
        assert!((obj + 4.0).abs() < 1e-8, "<D,V> = {obj}, want -4");
        // V = [[0, -2], [0, 0]] up to the power-iteration tolerance
        assert!((v[1] + 2.0).abs() < 1e-6);
        for i in [0, 2, 3] {
            assert!(v[i].abs() < 1e-6);
        }
    }

    #[test]
    fn nuclear_duality_identity_and_membership() {
        let set = FeasibleSet::nuclear_ball(2.0, 4, 3).unwrap();
        let mut rng = Rng::new(23);
        let mut w = ws();
        for _ in 0..50 {
            let d = Vector::from_vec((0..12).map(|_| rng.normal()).collect()).unwrap();
            let v = set.lmo(&d, &mut w).unwrap();
            let m = Matrix::from_vec(d.as_slice().to_vec(), 4, 3).unwrap();
            let sigma = svd::spectral_norm(&m);
            let obj = dot(d.as_slice(), v.as_slice());
            assert!((obj + 2.0 * sigma).abs() <= 1e-6 * 2.0 * sigma);
            assert!(set.membership(&v, 1e-9).unwrap());
        }
    }

    #[test]
    fn nuclear_scale_equivariance_in_objective() {
        let set = FeasibleSet::nuclear_ball(1.0, 3, 3).unwrap();
        let mut rng = Rng::new(24);
        let d = Vector::from_vec((0..9).map(|_| rng.normal()).collect()).unwrap();
        let v1 = set.lmo(&d, &mut ws()).unwrap();
        let v2 = set.lmo(&d.scale(5.0), &mut ws()).unwrap();
        let o1 = dot(d.as_slice(), v1.as_slice());
        let o2 = dot(d.as_slice(), v2.as_slice());
        assert!((o1 - o2).abs() <= 1e-8 * o1.abs());
    }

    #[test]
    fn lmo_beats_random_boundary_points() {
        let mut rng = Rng::new(25);
        let lp = FeasibleSet::lp_ball(1.5, 3.0, 5).unwrap();
        for _ in 0..100 {
            let d = Vector::from_vec((0..5).map(|_| rng.normal()).collect()).unwrap();
            let v = lp.lmo(&d, &mut ws()).unwrap();
            let obj = dot(d.as_slice(), v.as_slice());
            for _ in 0..100 {
                let z: Vec<f64> = (0..5).map(|_| rng.normal()).collect();
                let zn = numerics::lp_norm(&z, 3.0).unwrap();
                let z: Vec<f64> = z.iter().map(|x| 1.5 * x / zn).collect();
                assert!(obj <= dot(d.as_slice(), &z) + 1e-9);
            }
        }
    }

    #[test]
    fn diameters() {
        assert_eq!(FeasibleSet::l1_ball(1.0, 4).unwrap().diameter(), 2.0);
        assert_eq!(FeasibleSet::lp_ball(1.0, 3.0, 9).unwrap().diameter(), 2.0);
        assert_eq!(FeasibleSet::nuclear_ball(5.0, 4, 3).unwrap().diameter(), 10.0);
        // 1 < p < 2 picks up the dimension factor
        let d = FeasibleSet::lp_ball(1.0, 1.5, 16).unwrap().diameter();
        assert!((d - 2.0 * 16.0_f64.powf(1.0 / 1.5 - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn nuclear_diameter_attained_on_rank_one_extremes() {
        // max ‖X - Y‖_F over sampled extreme points approaches 2 delta.
        let set = FeasibleSet::nuclear_ball(5.0, 4, 3).unwrap();
        let mut rng = Rng::new(26);
        let mut best: f64 = 0.0;
        let sample = |rng: &mut Rng| {
            let u = rng.unit_vector(4);
            let v = rng.unit_vector(3);
            let mut x = vec![0.0; 12];
            for r in 0..4 {
                for c in 0..3 {
                    x[r * 3 + c] = 5.0 * u[r] * v[c];
                }
            }
            x
        };
        for _ in 0..500 {
            let x = sample(&mut rng);
            let y = sample(&mut rng);
            let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.max(d2.sqrt());
            assert!(d2.sqrt() <= set.diameter() + 1e-12);
        }
        assert!(best > 0.9 * set.diameter());
    }

    #[test]
    fn membership_examples() {
        let l1 = FeasibleSet::l1_ball(1.0, 2).unwrap();
        let x = Vector::from_vec(vec![0.5, -0.5]).unwrap();
        assert!(l1.membership(&x, 0.0).unwrap());

        let lp = FeasibleSet::lp_ball(1.0, 3.0, 2).unwrap();
        let y = Vector::from_vec(vec![1.0, 1.0]).unwrap();
        assert!(!lp.membership(&y, 1e-9).unwrap());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(FeasibleSet::lp_ball(0.0, 3.0, 2).is_err());
        assert!(FeasibleSet::lp_ball(1.0, 1.0, 2).is_err());
        assert!(FeasibleSet::l1_ball(-1.0, 2).is_err());
        assert!(FeasibleSet::nuclear_ball(1.0, 0, 2).is_err());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let set = FeasibleSet::l1_ball(1.0, 3).unwrap();
        assert!(set.lmo(&Vector::zeros(4), &mut ws()).is_err());
        assert!(set.membership(&Vector::zeros(2), 0.0).is_err());
    }
}
