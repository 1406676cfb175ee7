//! Dense complex matrices and the tolerance policy shared by every module.
//!
//! Matrices are immutable values stored row-major. Every operation returns a
//! fresh matrix, so all functions here are safe to call concurrently.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GenInvError, Result};

pub type C64 = Complex64;

/// Comparison and rank-decision thresholds.
///
/// Two matrices are considered equal when
/// `‖A − B‖_F ≤ eq_abs + eq_rel · (1 + ‖A‖_F + ‖B‖_F)`.
/// A singular value counts toward the rank when it exceeds
/// `rank_rel · max(m, n) · σ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eq_abs: f64,
    pub eq_rel: f64,
    pub rank_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eq_abs: 1e-10,
            eq_rel: 1e-9,
            rank_rel: 64.0 * f64::EPSILON,
        }
    }
}

impl Tolerance {
    pub fn new(eq_abs: f64, eq_rel: f64, rank_rel: f64) -> Result<Self> {
        let tol = Self {
            eq_abs,
            eq_rel,
            rank_rel,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eq_abs", self.eq_abs),
            ("eq_rel", self.eq_rel),
            ("rank_rel", self.rank_rel),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GenInvError::InvalidTolerance(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Largest admissible `‖A − B‖_F` for operands of the given norms.
    pub fn bound(&self, norm_a: f64, norm_b: f64) -> f64 {
        self.eq_abs + self.eq_rel * (1.0 + norm_a + norm_b)
    }

    /// Singular-value cutoff for an `m × n` matrix with largest singular value `smax`.
    pub fn rank_cutoff(&self, m: usize, n: usize, smax: f64) -> f64 {
        self.rank_rel * (m.max(n) as f64) * smax
    }
}

/// Dense complex matrix in row-major order.
///
/// A zero dimension is allowed so that empty blocks (for instance the `P`
/// factor of a nonsingular matrix) are representable; matrices read from
/// user input are always at least `1 × 1`.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GenInvError::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows of real numbers. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(GenInvError::InvalidShape("ragged rows".into()));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(GenInvError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(GenInvError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            let row = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(GenInvError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `A^k` by repeated multiplication; `A^0 = I`.
    pub fn pow(&self, k: usize) -> Result<Self> {
        let n = self.ensure_square()?;
        let mut acc = Self::identity(n);
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        let mismatch = |l: &Self, r: &Self| GenInvError::DimensionMismatch {
            op: "from_blocks",
            left: l.shape(),
            right: r.shape(),
        };
        if tl.rows != tr.rows {
            return Err(mismatch(tl, tr));
        }
        if bl.rows != br.rows {
            return Err(mismatch(bl, br));
        }
        if tl.cols != bl.cols {
            return Err(mismatch(tl, bl));
        }
        if tr.cols != br.cols {
            return Err(mismatch(tr, br));
        }
        let (r0, c0) = tl.shape();
        Ok(Self::from_fn(tl.rows + bl.rows, tl.cols + tr.cols, |i, j| {
            match (i < r0, j < c0) {
                (true, true) => tl.get(i, j),
                (true, false) => tr.get(i, j - c0),
                (false, true) => bl.get(i - r0, j),
                (false, false) => br.get(i - r0, j - c0),
            }
        }))
    }

    /// Block diagonal `a ⊕ b`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let (ra, ca) = a.shape();
        Self::from_fn(ra + b.rows, ca + b.cols, |i, j| match (i < ra, j < ca) {
            (true, true) => a.get(i, j),
            (false, false) => b.get(i - ra, j - ca),
            _ => C64::new(0.0, 0.0),
        })
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.try_sub(&other.matmul(self)?)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                if z.im == 0.0 {
                    write!(f, "{:>10.4} ", z.re)?;
                } else {
                    write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator forms panic on shape mismatch; they are for algorithm code whose
// shapes are fixed by construction. Fallible callers use `matmul`/`try_*`.

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

pub fn conj_transpose(a: &CMatrix) -> CMatrix {
    a.conj_transpose()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)
}

/// `‖A − B‖_F`, or an error when shapes differ.
pub fn residual(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(a.try_sub(b)?.frobenius_norm())
}

pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<bool> {
    let r = residual(a, b)?;
    Ok(r <= tol.bound(a.frobenius_norm(), b.frobenius_norm()))
}

/// Residual of `a − b` scaled by the tolerance bound: values `≤ 1` mean equal.
pub fn scaled_residual(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<f64> {
    let r = residual(a, b)?;
    Ok(r / tol.bound(a.frobenius_norm(), b.frobenius_norm()))
}

/// Outcome of one residual test: the boolean and the numbers behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
    pub bound: f64,
}

impl Check {
    /// `X = Y` under the tolerance policy of [`approx_eq`].
    pub fn eq(x: &CMatrix, y: &CMatrix, tol: &Tolerance) -> Result<Self> {
        Self::eq_scaled(x, y, 0.0, tol)
    }

    /// `X = Y` with an extra magnitude `scale` added to the relative term, for
    /// sides that are products whose factors are much larger than the result.
    pub fn eq_scaled(x: &CMatrix, y: &CMatrix, scale: f64, tol: &Tolerance) -> Result<Self> {
        let residual = residual(x, y)?;
        let bound = tol.bound(x.frobenius_norm(), y.frobenius_norm() + scale);
        Ok(Self {
            holds: residual <= bound,
            residual,
            bound,
        })
    }

    /// `X = 0`, where `scale` is the magnitude of the factors forming `X`.
    pub fn zero(x: &CMatrix, scale: f64, tol: &Tolerance) -> Self {
        let residual = x.frobenius_norm();
        let bound = tol.bound(scale, 0.0);
        Self {
            holds: residual <= bound,
            residual,
            bound,
        }
    }

    /// Residual over bound; at most 1 when the check holds.
    pub fn ratio(&self) -> f64 {
        self.residual / self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> CMatrix {
        CMatrix::from_real_rows(&[[2.0, 0.0, 1.0], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
    }

    fn a2() -> CMatrix {
        CMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [1.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    }

    #[test]
    fn conj_transpose_examples() {
        let j = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(
            j.conj_transpose(),
            CMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]])
        );
        let i = CMatrix::new(1, 1, vec![C64::new(0.0, 1.0)]).unwrap();
        assert_eq!(i.conj_transpose().get(0, 0), C64::new(0.0, -1.0));
        assert_eq!(a1().conj_transpose().conj_transpose(), a1());
    }

    #[test]
    fn matmul_examples() {
        assert_eq!(CMatrix::identity(3).matmul(&a1()).unwrap(), a1());
        let cube = &(&a1() * &a1()) * &a1();
        let sq = &a1() * &a1();
        assert_eq!(a1().pow(3).unwrap(), cube);
        assert_eq!(&sq * &a1(), cube);

        let a3 = CMatrix::from_real_rows(&[[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 2.0, 0.0]]);
        let b3 = CMatrix::from_real_rows(&[[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 1.0]]);
        assert_eq!(
            a3.matmul(&b3).unwrap(),
            CMatrix::from_real_rows(&[[4.0, 0.0, 0.0], [0.0, 0.0, 0.0], [4.0, 0.0, 0.0]])
        );
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let err = CMatrix::zeros(2, 3).matmul(&CMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, GenInvError::DimensionMismatch { .. }));
    }

    #[test]
    fn approx_eq_examples() {
        let tol = Tolerance::default();
        assert!(approx_eq(&a1(), &a1(), &tol).unwrap());
        let mut bumped = a1().data().to_vec();
        bumped[0] += C64::new(1e-13, 0.0);
        let bumped = CMatrix::new(3, 3, bumped).unwrap();
        assert!(approx_eq(&a1(), &bumped, &tol).unwrap());
        assert!(!approx_eq(&a1(), &a2(), &tol).unwrap());
        assert!(approx_eq(&a1(), &CMatrix::zeros(2, 2), &tol).is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0, 1e-9, 1e-14).is_err());
        assert!(Tolerance::new(1e-10, f64::NAN, 1e-14).is_err());
        assert!(Tolerance::new(1e-10, 1e-9, 1e-14).is_ok());
    }

    #[test]
    fn blocks_round_trip() {
        let m = CMatrix::from_fn(4, 5, |i, j| C64::new(i as f64, j as f64));
        let rebuilt = CMatrix::from_blocks(
            &m.submatrix(0, 2, 0, 3),
            &m.submatrix(0, 2, 3, 5),
            &m.submatrix(2, 4, 0, 3),
            &m.submatrix(2, 4, 3, 5),
        )
        .unwrap();
        assert_eq!(rebuilt, m);
        // empty right-hand blocks
        let sq = CMatrix::identity(2);
        let e = CMatrix::zeros(2, 0);
        let e2 = CMatrix::zeros(0, 0);
        let full = CMatrix::from_blocks(&sq, &e, &CMatrix::zeros(0, 2), &e2).unwrap();
        assert_eq!(full, sq);
    }
}
