//! Exact Gaussian-rational matrices and the generalized inverses computed
//! without rounding, used as an oracle for the floating-point kernel.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{GenInvError, Result};
use crate::numkernel::{CMatrix, C64};

pub type Q = Complex<BigRational>;

fn q_zero() -> Q {
    Q::new(BigRational::zero(), BigRational::zero())
}

fn q_one() -> Q {
    Q::new(BigRational::one(), BigRational::zero())
}

fn q_int(v: i64) -> Q {
    Q::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
}

#[derive(Clone, PartialEq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    if z.im.is_zero() {
                        z.re.to_string()
                    } else {
                        format!("{}+{}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![q_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = q_one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_fn(rows.len(), cols, |i, j| q_int(rows[i].as_ref()[j]))
    }

    /// Exact image of a floating-point matrix: every finite `f64` is a dyadic
    /// rational, so no rounding occurs.
    pub fn from_cmatrix(a: &CMatrix) -> Result<Self> {
        let conv = |x: f64| {
            BigRational::from_float(x).ok_or_else(|| GenInvError::InvalidShape("non-finite entry".into()))
        };
        let mut data = Vec::with_capacity(a.rows() * a.cols());
        for z in a.data() {
            data.push(Q::new(conv(z.re)?, conv(z.im)?));
        }
        Ok(Self {
            rows: a.rows(),
            cols: a.cols(),
            data,
        })
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let z = self.get(i, j);
            C64::new(f(&z.re), f(&z.im))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.is_zero())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(GenInvError::DimensionMismatch {
                op: "exact matmul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Result<Self> {
        if self.rows != self.cols {
            return Err(GenInvError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    fn columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }
}

/// Reduced row echelon form and pivot columns.
fn rref(a: &RMatrix) -> (RMatrix, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, row * m.cols + j);
            }
        }
        let inv = q_one() / m.get(row, col);
        for j in col..m.cols {
            let v = m.get(row, j) * &inv;
            m.set(row, j, v);
        }
        for i in 0..m.rows {
            if i == row || m.get(i, col).is_zero() {
                continue;
            }
            let f = m.get(i, col).clone();
            for j in col..m.cols {
                let v = m.get(i, j) - &f * m.get(row, j);
                m.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn exact_rank(a: &RMatrix) -> usize {
    rref(a).1.len()
}

/// Inverse of a nonsingular square matrix by Gauss-Jordan elimination.
pub fn exact_inverse(a: &RMatrix) -> Result<RMatrix> {
    let n = a.rows;
    if n != a.cols {
        return Err(GenInvError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let aug = RMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else if j - n == i {
            q_one()
        } else {
            q_zero()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(GenInvError::PreconditionViolated("matrix is singular".into()));
    }
    Ok(RMatrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
}

/// Moore-Penrose inverse via a full-rank factorization `A = FG`:
/// `A† = G*(GG*)⁻¹(F*F)⁻¹F*`.
pub fn exact_pinv(a: &RMatrix) -> Result<RMatrix> {
    let (r, pivots) = rref(a);
    let rank = pivots.len();
    if rank == 0 {
        return Ok(RMatrix::zeros(a.cols, a.rows));
    }
    let f = a.columns(&pivots);
    let g = RMatrix::from_fn(rank, a.cols, |i, j| r.get(i, j).clone());
    let (fs, gs) = (f.conj_transpose(), g.conj_transpose());
    let ggs = exact_inverse(&g.mul(&gs)?)?;
    let fsf = exact_inverse(&fs.mul(&f)?)?;
    gs.mul(&ggs)?.mul(&fsf)?.mul(&fs)
}

pub fn exact_index(a: &RMatrix) -> Result<usize> {
    if a.rows != a.cols {
        return Err(GenInvError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let mut power = RMatrix::identity(a.rows);
    let mut rank = a.rows;
    for k in 0..=a.rows {
        let next = power.mul(a)?;
        let next_rank = exact_rank(&next);
        if next_rank == rank {
            return Ok(k);
        }
        power = next;
        rank = next_rank;
    }
    Ok(a.rows)
}

pub fn exact_drazin(a: &RMatrix) -> Result<RMatrix> {
    let k = exact_index(a)?;
    let ak = a.pow(k)?;
    let big = a.pow(2 * k + 1)?;
    ak.mul(&exact_pinv(&big)?)?.mul(&ak)
}

/// The composite inverses of one matrix in exact arithmetic.
#[derive(Debug, Clone)]
pub struct ExactInverses {
    pub index: usize,
    pub mp: RMatrix,
    pub drazin: RMatrix,
    pub dmp: RMatrix,
    pub mpd: RMatrix,
    pub cmp: RMatrix,
    pub mpdmp: RMatrix,
}

impl ExactInverses {
    pub fn compute(a: &RMatrix) -> Result<Self> {
        let index = exact_index(a)?;
        let mp = exact_pinv(a)?;
        let drazin = exact_drazin(a)?;
        let core = a.mul(&drazin)?.mul(a)?;
        Ok(Self {
            index,
            dmp: drazin.mul(a)?.mul(&mp)?,
            mpd: mp.mul(a)?.mul(&drazin)?,
            cmp: mp.mul(&core)?.mul(&mp)?,
            mpdmp: mp.mul(&drazin)?.mul(&mp)?,
            mp,
            drazin,
        })
    }

    pub fn named(&self) -> [(&'static str, &RMatrix); 6] {
        [
            ("mp", &self.mp),
            ("drazin", &self.drazin),
            ("dmp", &self.dmp),
            ("mpd", &self.mpd),
            ("cmp", &self.cmp),
            ("mpdmp", &self.mpdmp),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Q {
        Q::new(BigRational::new(n.into(), d.into()), BigRational::zero())
    }

    fn rm(rows: &[[(i64, i64); 3]; 3]) -> RMatrix {
        RMatrix::from_fn(3, 3, |i, j| rat(rows[i][j].0, rows[i][j].1))
    }

    fn a1() -> RMatrix {
        RMatrix::from_integers(&[[2, 0, 1], [0, 0, 2], [0, 0, 0]])
    }

    fn a2() -> RMatrix {
        RMatrix::from_integers(&[[1, 0, 0], [1, 0, 1], [0, 0, 0]])
    }

    fn a3() -> RMatrix {
        RMatrix::from_integers(&[[2, 0, 0], [0, 0, 0], [2, 2, 0]])
    }

    #[test]
    fn pinv_examples() {
        let z = (0, 1);
        assert_eq!(
            exact_pinv(&a1()).unwrap(),
            rm(&[[(1, 2), (-1, 4), z], [z, z, z], [z, (1, 2), z]])
        );
        assert_eq!(exact_pinv(&RMatrix::identity(3)).unwrap(), RMatrix::identity(3));
        assert_eq!(
            exact_pinv(&a2()).unwrap(),
            RMatrix::from_integers(&[[1, 0, 0], [0, 0, 0], [-1, 1, 0]])
        );
        assert_eq!(exact_pinv(&RMatrix::zeros(2, 3)).unwrap(), RMatrix::zeros(3, 2));
    }

    #[test]
    fn penrose_equations_hold_exactly() {
        let a = RMatrix::from_integers(&[[1, 2, 3], [2, 4, 6], [1, 0, -1]]);
        let x = exact_pinv(&a).unwrap();
        assert_eq!(a.mul(&x).unwrap().mul(&a).unwrap(), a);
        assert_eq!(x.mul(&a).unwrap().mul(&x).unwrap(), x);
        let ax = a.mul(&x).unwrap();
        assert_eq!(ax.conj_transpose(), ax);
        let xa = x.mul(&a).unwrap();
        assert_eq!(xa.conj_transpose(), xa);
    }

    #[test]
    fn complex_entries() {
        let i = Q::new(BigRational::zero(), BigRational::one());
        let a = RMatrix::from_fn(2, 2, |r, c| if r == 0 && c == 1 { i.clone() } else if r == c { q_one() } else { q_zero() });
        let x = exact_pinv(&a).unwrap();
        assert_eq!(a.mul(&x).unwrap(), RMatrix::identity(2));
    }

    #[test]
    fn drazin_examples() {
        let z = (0, 1);
        assert_eq!(exact_drazin(&a1()).unwrap(), rm(&[[(1, 2), z, (1, 4)], [z, z, z], [z, z, z]]));
        assert_eq!(exact_drazin(&a3()).unwrap(), rm(&[[(1, 2), z, z], [z, z, z], [(1, 2), z, z]]));
        let n = RMatrix::from_integers(&[[0, 1, 3], [0, 0, 2], [0, 0, 0]]);
        assert!(exact_drazin(&n).unwrap().is_zero());
        assert_eq!(exact_index(&n).unwrap(), 3);
        assert_eq!(exact_index(&a1()).unwrap(), 2);
    }

    #[test]
    fn composite_fixtures() {
        let z = (0, 1);
        let e = ExactInverses::compute(&a1()).unwrap();
        assert_eq!(e.dmp, rm(&[[(1, 2), z, z], [z, z, z], [z, z, z]]));
        assert_eq!(e.mpd, rm(&[[(1, 2), z, (1, 4)], [z, z, z], [z, z, z]]));
        assert_eq!(e.mpdmp, rm(&[[(1, 8), z, z], [z, z, z], [z, z, z]]));
        let e = ExactInverses::compute(&a3()).unwrap();
        assert_eq!(e.cmp, e.mpd);
        assert_eq!(e.drazin, e.dmp);
    }

    #[test]
    fn float_round_trip() {
        let c = crate::fixtures::a1();
        let r = RMatrix::from_cmatrix(&c).unwrap();
        assert_eq!(r, a1());
        assert_eq!(r.to_cmatrix(), c);
    }
}
