//! Dense vector/matrix arithmetic, norms, a seeded random source, and power
//! iteration for the top singular pair.
//!
//! This is the only linear-algebra layer the rest of the crate uses. All
//! reductions run in a fixed sequential order so that results are
//! bit-reproducible for a given seed.

mod power;
mod rng;
pub mod svd;

pub use power::{top_singular_pair, PowerIterConfig, SingularPair};
pub use rng::Rng;

use crate::error::{Error, Result};

/// Dense real vector. Constructors reject NaN/Inf entries; arithmetic on
/// already-constructed vectors is unchecked.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite entry {} at index {i}",
                data[i]
            )));
        }
        Ok(Self { data })
    }

    /// Constructor for internal arithmetic results; skips the finiteness scan.
    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self { data: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn norm2(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// ‖self − other‖₂ without materializing the difference.
    pub fn dist2(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        let mut acc = 0.0;
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = a - b;
            acc += d * d;
        }
        acc.sqrt()
    }

    /// self + c · (other − self), the conditional-gradient update.
    pub fn convex_combination(&self, other: &Vector, c: f64) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, v)| x + c * (v - x))
            .collect();
        Vector::from_vec_unchecked(data)
    }

    /// self + c · other.
    pub fn scaled_add(&self, c: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x + c * y)
            .collect();
        Vector::from_vec_unchecked(data)
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector::from_vec_unchecked(self.data.iter().map(|x| c * x).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Vector::from_vec_unchecked(data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// Sequential dot product; the reduction order is part of the determinism
/// contract.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// ℓp norm, `p ≥ 1` or `f64::INFINITY`.
///
/// General exponents are scaled by the max entry before exponentiation so that
/// large inputs do not overflow.
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("norm exponent p = {p} must be >= 1")));
    }
    if v.is_empty() {
        return Ok(0.0);
    }
    if p == f64::INFINITY {
        return Ok(v.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    if p == 2.0 {
        return Ok(dot(v, v).sqrt());
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for x in v {
        acc += (x.abs() / scale).powf(p);
    }
    Ok(scale * acc.powf(1.0 / p))
}

/// Dense real matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn from_vec(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "data length {} != {rows} x {cols}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite entry {} at index {i}",
                data[i]
            )));
        }
        Ok(Self { data, rows, cols })
    }

    pub(crate) fn from_vec_unchecked(data: Vec<f64>, rows: usize, cols: usize) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { data, rows, cols }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { data: vec![0.0; rows * cols], rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// out = M x.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(r), x);
        }
    }

    /// out = Mᵀ x.
    pub fn tr_matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for r in 0..self.rows {
            let xr = x[r];
            let row = self.row(r);
            for (o, m) in out.iter_mut().zip(row) {
                *o += xr * m;
            }
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn frob_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagorean_norm() {
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0).unwrap(), 5.0);
    }

    #[test]
    fn zero_vector_norm_any_p() {
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            assert_eq!(lp_norm(&[0.0, 0.0, 0.0], p).unwrap(), 0.0);
        }
    }

    #[test]
    fn cube_norm_closed_form() {
        // (1^3 + 1^3)^(1/3) = 2^(1/3)
        let got = lp_norm(&[1.0, 1.0], 3.0).unwrap();
        let want = 2.0_f64.powf(1.0 / 3.0);
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn norm_rejects_p_below_one() {
        assert!(lp_norm(&[1.0], 0.5).is_err());
    }

    #[test]
    fn inf_norm_is_max_abs() {
        assert_eq!(lp_norm(&[1.0, -7.0, 3.0], f64::INFINITY).unwrap(), 7.0);
    }

    #[test]
    fn squared_two_norm_matches_dot() {
        let mut rng = Rng::new(11);
        for _ in 0..50 {
            let v: Vec<f64> = (0..37).map(|_| rng.normal() * 10.0).collect();
            let n = lp_norm(&v, 2.0).unwrap();
            let d = dot(&v, &v);
            assert!((n * n - d).abs() <= 1e-14 * d.max(1.0));
        }
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(Vector::from_vec(vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::from_vec(vec![1.0, f64::INFINITY], 1, 2).is_err());
        assert!(Matrix::from_vec(vec![1.0, 2.0, 3.0], 2, 2).is_err());
    }

    #[test]
    fn matvec_and_transpose_agree() {
        let m = Matrix::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2, 3).unwrap();
        let mut out = vec![0.0; 2];
        m.matvec(&[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, vec![-2.0, -2.0]);
        let mt = m.transpose();
        let mut out_t = vec![0.0; 3];
        mt.matvec(&[2.0, -1.0], &mut out_t);
        let mut out_tr = vec![0.0; 3];
        m.tr_matvec(&[2.0, -1.0], &mut out_tr);
        assert_eq!(out_t, out_tr);
    }
}
