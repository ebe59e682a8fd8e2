//! Dense complex linear algebra and seeded CN(0,1) sampling.
//!
//! Every channel, precoder and signal vector in the simulator is a
//! [`ComplexMatrix`]. Dimensions stay small (at most a few hundred per side),
//! so everything is plain row-major storage with LU factorisation using
//! partial (row) pivoting.

use std::fmt;
use std::ops::{Index, IndexMut, Range};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Condition estimate above which a matrix is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("dimension mismatch in {op}: left is {left:?}, right is {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular (pivot condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("matrix data has {len} entries, expected {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(NumericsError::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Column vector (n x 1) from a slice.
    pub fn column(values: &[Complex64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Entries of a single-column matrix (or of any matrix, row-major).
    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(NumericsError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Copy of the block `rows x cols`.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        assert!(rows.end <= self.rows && cols.end <= self.cols, "block out of range");
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows.start + r, cols.start + c)])
    }

    pub fn columns(&self, cols: Range<usize>) -> Self {
        self.block(0..self.rows, cols)
    }

    pub fn top_rows(&self, n: usize) -> Self {
        self.block(0..n, 0..self.cols)
    }

    /// Concatenates matrices left to right. All parts must share a row count.
    pub fn hstack(parts: &[&ComplexMatrix]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Ok(Self::zeros(0, 0));
        };
        let rows = first.rows;
        for p in parts {
            if p.rows != rows {
                return Err(NumericsError::DimensionMismatch {
                    op: "hstack",
                    left: first.shape(),
                    right: p.shape(),
                });
            }
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for p in parts {
                data.extend_from_slice(p.row(r));
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Concatenates matrices top to bottom. All parts must share a column count.
    pub fn vstack(parts: &[&ComplexMatrix]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Ok(Self::zeros(0, 0));
        };
        let cols = first.cols;
        let mut data = Vec::new();
        for p in parts {
            if p.cols != cols {
                return Err(NumericsError::DimensionMismatch {
                    op: "vstack",
                    left: first.shape(),
                    right: p.shape(),
                });
            }
            data.extend_from_slice(&p.data);
        }
        Ok(Self {
            rows: data.len() / cols.max(1),
            cols,
            data,
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for z in self.row(r) {
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Seeded random stream. `(seed, stream)` pins the whole sample sequence.
///
/// Streams are cheap; every Monte-Carlo trial should own one rather than
/// sharing a stream across threads.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One CN(0,1) draw: independent real and imaginary parts of variance 1/2.
    pub fn cn01(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re = self.standard_normal() * s;
        let im = self.standard_normal() * s;
        Complex64::new(re, im)
    }
}

/// i.i.d. CN(0,1) matrix of the given shape.
pub fn sample_cn01(rng: &mut RngStream, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| rng.cn01()).collect();
    ComplexMatrix { rows, cols, data }
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(NumericsError::DimensionMismatch {
            op: "mat_mul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            let brow = b.row(k);
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Matrix-vector product for a plain slice.
pub fn mat_vec(a: &ComplexMatrix, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.cols != x.len() {
        return Err(NumericsError::DimensionMismatch {
            op: "mat_vec",
            left: a.shape(),
            right: (x.len(), 1),
        });
    }
    Ok((0..a.rows)
        .map(|r| a.row(r).iter().zip(x).map(|(h, s)| h * s).sum())
        .collect())
}

/// LU factorisation `P A = L U` with partial row pivoting.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    n: usize,
    // L (unit diagonal, stored below) and U (on and above the diagonal).
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    condition: f64,
}

impl LuDecomposition {
    /// Factorises `a`, failing with [`NumericsError::Singular`] when the pivot
    /// ratio `max|u_ii| / min|u_ii|` exceeds [`SINGULARITY_THRESHOLD`].
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(NumericsError::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, lu[r * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                return Err(NumericsError::Singular {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for r in k + 1..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in k + 1..n {
                    let u = lu[k * n + c];
                    lu[r * n + c] -= factor * u;
                }
            }
        }
        let (lo, hi) = (0..n)
            .map(|i| lu[i * n + i].norm())
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let condition = if n == 0 { 1.0 } else { hi / lo };
        if condition.is_nan() || condition > SINGULARITY_THRESHOLD {
            return Err(NumericsError::Singular { condition });
        }
        Ok(Self { n, lu, perm, condition })
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Solves `A X = B` for every column of `b`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.n;
        if b.rows != n {
            return Err(NumericsError::DimensionMismatch {
                op: "mat_solve",
                left: (n, n),
                right: b.shape(),
            });
        }
        let m = b.cols;
        let mut x = ComplexMatrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.data[i * m..(i + 1) * m].copy_from_slice(b.row(p));
        }
        // forward substitution, unit lower triangle
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[i * n + k];
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..m {
                    let v = x.data[k * m + c];
                    x.data[i * m + c] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                for c in 0..m {
                    let v = x.data[k * m + c];
                    x.data[i * m + c] -= u * v;
                }
            }
            let d = self.lu[i * n + i];
            for c in 0..m {
                x.data[i * m + c] /= d;
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.solve(&ComplexMatrix::column(b))?.into_vec())
    }
}

pub fn mat_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = LuDecomposition::new(a)?;
    lu.solve(&ComplexMatrix::identity(a.rows))
}

pub fn mat_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != b.rows {
        return Err(NumericsError::DimensionMismatch {
            op: "mat_solve",
            left: a.shape(),
            right: b.shape(),
        });
    }
    LuDecomposition::new(a)?.solve(b)
}

pub fn solve_vec(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    LuDecomposition::new(a)?.solve_vec(b)
}

/// Numerical rank: pivots of a fully pivoted elimination whose modulus exceeds
/// `tol` times the largest pivot.
pub fn mat_rank(a: &ComplexMatrix, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let (rows, cols) = a.shape();
    let mut w = a.data.clone();
    let mut rank = 0;
    let mut largest = 0.0;
    for k in 0..rows.min(cols) {
        let mut best = (k, k, 0.0);
        for r in k..rows {
            for c in k..cols {
                let v = w[r * cols + c].norm();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if k == 0 {
            largest = best.2;
        }
        if best.2 == 0.0 || best.2 <= tol * largest {
            break;
        }
        let (pr, pc, _) = best;
        if pr != k {
            for c in 0..cols {
                w.swap(k * cols + c, pr * cols + c);
            }
        }
        if pc != k {
            for r in 0..rows {
                w.swap(r * cols + k, r * cols + pc);
            }
        }
        let pivot = w[k * cols + k];
        for r in k + 1..rows {
            let factor = w[r * cols + k] / pivot;
            for c in k..cols {
                let u = w[k * cols + c];
                w[r * cols + c] -= factor * u;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_stream() {
        let a = sample_cn01(&mut RngStream::new(1, 0), 2, 2);
        let b = sample_cn01(&mut RngStream::new(1, 0), 2, 2);
        assert_eq!(a.as_slice(), b.as_slice());
        let c = sample_cn01(&mut RngStream::new(2, 0), 3, 4);
        let d = sample_cn01(&mut RngStream::new(1, 0), 3, 4);
        assert_ne!(c.as_slice(), d.as_slice());
        let e = sample_cn01(&mut RngStream::new(1, 1), 3, 4);
        assert_ne!(d.as_slice(), e.as_slice());
    }

    #[test]
    fn cn01_has_unit_complex_variance() {
        let m = sample_cn01(&mut RngStream::new(1, 0), 1000, 1000);
        let n = (m.rows() * m.cols()) as f64;
        let power = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        assert!((power - 1.0).abs() < 0.05, "mean |z|^2 = {power}");
        let re_var = m.as_slice().iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let im_var = m.as_slice().iter().map(|z| z.im * z.im).sum::<f64>() / n;
        assert!((re_var - 0.5).abs() < 0.01 && (im_var - 0.5).abs() < 0.01);
    }

    #[test]
    fn identity_and_zero_products() {
        let a = sample_cn01(&mut RngStream::new(3, 0), 3, 3);
        assert_eq!(mat_mul(&ComplexMatrix::identity(3), &a).unwrap(), a);
        let z = mat_mul(&a, &ComplexMatrix::zeros(3, 2)).unwrap();
        assert_eq!(z, ComplexMatrix::zeros(3, 2));
    }

    #[test]
    fn mul_rejects_mismatched_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let err = mat_mul(&a, &a).unwrap_err();
        assert!(matches!(err, NumericsError::DimensionMismatch { .. }));
    }

    #[test]
    fn product_conjugate_transpose_identity() {
        let mut rng = RngStream::new(7, 0);
        let a = sample_cn01(&mut rng, 3, 3);
        let b = sample_cn01(&mut rng, 3, 3);
        let lhs = mat_mul(&a, &b).unwrap().conj_transpose();
        let rhs = mat_mul(&b.conj_transpose(), &a.conj_transpose()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn inverse_of_identity_and_diagonal() {
        assert_eq!(mat_inverse(&ComplexMatrix::identity(4)).unwrap(), ComplexMatrix::identity(4));
        let d = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let inv = mat_inverse(&d).unwrap();
        let expected = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert!(inv.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn inverse_residual_is_small() {
        let a = sample_cn01(&mut RngStream::new(3, 0), 5, 5);
        let x = mat_inverse(&a).unwrap();
        let r = mat_mul(&a, &x).unwrap().sub(&ComplexMatrix::identity(5)).unwrap();
        assert!(r.frobenius_norm() < 1e-9 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn singular_and_non_square_are_rejected() {
        let mut s = ComplexMatrix::zeros(2, 2);
        s[(0, 0)] = c(1.0, 0.0);
        s[(0, 1)] = c(2.0, 0.0);
        s[(1, 0)] = c(2.0, 0.0);
        s[(1, 1)] = c(4.0, 0.0);
        assert!(matches!(mat_inverse(&s), Err(NumericsError::Singular { .. })));
        // nearly singular: pivot ratio beyond the threshold
        let near = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1e-13, 0.0)]);
        assert!(matches!(mat_inverse(&near), Err(NumericsError::Singular { .. })));
        assert!(matches!(
            mat_inverse(&ComplexMatrix::zeros(2, 3)),
            Err(NumericsError::NotSquare { .. })
        ));
    }

    #[test]
    fn solve_cases() {
        let mut rng = RngStream::new(9, 0);
        let a = sample_cn01(&mut rng, 4, 4);
        let b = sample_cn01(&mut rng, 4, 2);
        assert_eq!(mat_solve(&ComplexMatrix::identity(4), &b).unwrap(), b);
        let self_solve = mat_solve(&a, &a).unwrap();
        assert!(self_solve.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() < 1e-9);
        let x = mat_solve(&a, &b).unwrap();
        let resid = mat_mul(&a, &x).unwrap().sub(&b).unwrap().frobenius_norm();
        assert!(resid < 1e-9);
        let bad = ComplexMatrix::zeros(3, 1);
        assert!(matches!(mat_solve(&a, &bad), Err(NumericsError::DimensionMismatch { .. })));
    }

    #[test]
    fn rank_cases() {
        assert_eq!(mat_rank(&ComplexMatrix::identity(5), 1e-10), 5);
        let mut rng = RngStream::new(11, 0);
        let u = sample_cn01(&mut rng, 4, 1);
        let v = sample_cn01(&mut rng, 3, 1);
        let outer = mat_mul(&u, &v.conj_transpose()).unwrap();
        assert_eq!(mat_rank(&outer, 1e-10), 1);
        assert_eq!(mat_rank(&ComplexMatrix::zeros(3, 3), 1e-10), 0);
    }

    /// Independent full-rank oracle for a 3x5 matrix: the 3x3 Gram matrix
    /// A A^H has a nonzero determinant (cofactor expansion).
    #[test]
    fn rank_of_random_wide_matrix_matches_gram_determinant() {
        let a = sample_cn01(&mut RngStream::new(11, 0), 3, 5);
        let g = mat_mul(&a, &a.conj_transpose()).unwrap();
        let det = g[(0, 0)] * (g[(1, 1)] * g[(2, 2)] - g[(1, 2)] * g[(2, 1)])
            - g[(0, 1)] * (g[(1, 0)] * g[(2, 2)] - g[(1, 2)] * g[(2, 0)])
            + g[(0, 2)] * (g[(1, 0)] * g[(2, 1)] - g[(1, 1)] * g[(2, 0)]);
        assert!(det.norm() > 1e-6);
        assert_eq!(mat_rank(&a, 1e-10), 3);
    }

    #[test]
    fn constructor_validates() {
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(0.0, 1.0)]).is_ok());
    }

    #[test]
    fn stacking_and_blocks() {
        let a = sample_cn01(&mut RngStream::new(4, 0), 2, 3);
        let b = sample_cn01(&mut RngStream::new(5, 0), 2, 1);
        let h = ComplexMatrix::hstack(&[&a, &b]).unwrap();
        assert_eq!(h.shape(), (2, 4));
        assert_eq!(h.columns(0..3), a);
        assert_eq!(h.columns(3..4), b);
        let v = ComplexMatrix::vstack(&[&a, &a]).unwrap();
        assert_eq!(v.shape(), (4, 3));
        assert_eq!(v.block(2..4, 0..3), a);
        assert!(ComplexMatrix::hstack(&[&a, &v]).is_err());
    }
}
