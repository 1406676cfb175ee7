//! Index, Drazin and group inverses, the core-nilpotent splitting and the
//! canonical projectors.
//!
//! The Drazin inverse uses the Greville formula `A^d = A^k (A^{2k+1})† A^k`
//! with `k = Ind(A)`, so only Moore-Penrose inverses of powers are needed.

use crate::error::{GenInvError, Result};
use crate::factor::{numerical_rank_scaled, pinv, pinv_scaled, spectral_norm};
use crate::numkernel::{CMatrix, Tolerance};

/// Smallest `k ≥ 0` with `rank(A^k) = rank(A^{k+1})`, where `A^0 = I`.
///
/// Ranks of powers are cut off relative to `‖A‖₂^k`, the size of the rounding
/// error in `A^k`, rather than to `‖A^k‖₂`.
pub fn index(a: &CMatrix, tol: &Tolerance) -> Result<usize> {
    index_at_scale(a, 0.0, tol)
}

/// [`index`] for a block of a larger matrix whose entries are of size
/// `scale`, so that a block made of rounding noise counts as zero.
pub fn index_at_scale(a: &CMatrix, scale: f64, tol: &Tolerance) -> Result<usize> {
    let n = a.ensure_square()?;
    let norm = spectral_norm(a)?.max(scale);
    let mut power = CMatrix::identity(n);
    let mut rank = n;
    for k in 0..=n {
        let next = power.matmul(a)?;
        let next_rank = numerical_rank_scaled(&next, norm.powi(k as i32 + 1), tol)?;
        if next_rank == rank {
            return Ok(k);
        }
        power = next;
        rank = next_rank;
    }
    // Ranks strictly decrease at most n times.
    Ok(n)
}

/// Greville formula with an explicit exponent. Any `k ≥ Ind(A)` gives `A^d`.
pub fn drazin_with_exponent(a: &CMatrix, k: usize, tol: &Tolerance) -> Result<CMatrix> {
    drazin_with_exponent_at_scale(a, k, 0.0, tol)
}

fn drazin_with_exponent_at_scale(a: &CMatrix, k: usize, scale: f64, tol: &Tolerance) -> Result<CMatrix> {
    let ak = a.pow(k)?;
    let big = a.pow(2 * k + 1)?;
    let reference = spectral_norm(a)?.max(scale).powi(2 * k as i32 + 1);
    Ok(&(&ak * &pinv_scaled(&big, reference, tol)?) * &ak)
}

pub fn drazin(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    drazin_at_scale(a, 0.0, tol)
}

/// [`drazin`] with the rank cutoffs of [`index_at_scale`].
pub fn drazin_at_scale(a: &CMatrix, scale: f64, tol: &Tolerance) -> Result<CMatrix> {
    let k = index_at_scale(a, scale, tol)?;
    drazin_with_exponent_at_scale(a, k, scale, tol)
}

pub fn group_inverse(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let k = index(a, tol)?;
    if k > 1 {
        return Err(GenInvError::IndexTooLarge { index: k });
    }
    drazin_with_exponent(a, k, tol)
}

/// `A = A_c + A_n` with `A_c A_n = A_n A_c = 0`, `Ind(A_c) ≤ 1`, `A_n` nilpotent.
#[derive(Debug, Clone)]
pub struct CoreNilpotent {
    pub core: CMatrix,
    pub nilpotent: CMatrix,
    pub index: usize,
}

pub fn core_nilpotent(a: &CMatrix, tol: &Tolerance) -> Result<CoreNilpotent> {
    let k = index(a, tol)?;
    let ad = drazin_with_exponent(a, k, tol)?;
    let core = &(a * &ad) * a;
    let nilpotent = a - &core;
    Ok(CoreNilpotent {
        core,
        nilpotent,
        index: k,
    })
}

/// The orthogonal projectors `(P_A, Q_A) = (AA†, A†A)` onto `R(A)` and `R(A*)`.
pub fn projectors(a: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    let ap = pinv(a, tol)?;
    Ok((a * &ap, &ap * a))
}

/// `AA^d`, the projector onto `R(A^k)` along `N(A^k)`.
pub fn spectral_projector(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(a * &drazin(a, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{numerical_rank, projector_residual};
    use crate::fixtures;
    use crate::numkernel::approx_eq;
    use crate::verify::ensemble::{gen, EnsembleClass, EnsembleSpec};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn jordan(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            num_complex::Complex64::new(if j == i + 1 { 1.0 } else { 0.0 }, 0.0)
        })
    }

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        (a - b).max_abs() < 1e-10
    }

    #[test]
    fn index_examples() {
        assert_eq!(index(&fixtures::a1(), &tol()).unwrap(), 2);
        assert_eq!(index(&CMatrix::identity(3), &tol()).unwrap(), 0);
        assert_eq!(index(&fixtures::a3(), &tol()).unwrap(), 2);
        assert_eq!(index(&CMatrix::zeros(3, 3), &tol()).unwrap(), 1);
        assert_eq!(index(&jordan(4), &tol()).unwrap(), 4);
        assert!(index(&CMatrix::zeros(2, 3), &tol()).is_err());
    }

    #[test]
    fn drazin_fixtures() {
        let d1 = CMatrix::from_real_rows(&[[0.5, 0.0, 0.25], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let d2 = CMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(close(&drazin(&fixtures::a1(), &tol()).unwrap(), &d1));
        assert!(close(&drazin(&fixtures::a2(), &tol()).unwrap(), &d2));
        assert_eq!(drazin(&jordan(3), &tol()).unwrap(), CMatrix::zeros(3, 3));
    }

    #[test]
    fn group_inverse_examples() {
        assert!(close(&group_inverse(&CMatrix::identity(3), &tol()).unwrap(), &CMatrix::identity(3)));
        assert_eq!(
            group_inverse(&fixtures::a1(), &tol()).unwrap_err(),
            GenInvError::IndexTooLarge { index: 2 }
        );
        assert!(close(
            &group_inverse(&CMatrix::diag_real(&[2.0, 0.0]), &tol()).unwrap(),
            &CMatrix::diag_real(&[0.5, 0.0])
        ));
    }

    #[test]
    fn core_nilpotent_examples() {
        let cn = core_nilpotent(&jordan(3), &tol()).unwrap();
        assert_eq!(cn.core, CMatrix::zeros(3, 3));
        assert_eq!(cn.nilpotent, jordan(3));

        let a = CMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 3.0]]);
        let cn = core_nilpotent(&a, &tol()).unwrap();
        assert!(close(&cn.core, &a));
        assert!(cn.nilpotent.max_abs() < 1e-12);

        let cn = core_nilpotent(&fixtures::a1(), &tol()).unwrap();
        assert!(close(
            &cn.core,
            &CMatrix::from_real_rows(&[[2.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        ));
        assert!(close(
            &cn.nilpotent,
            &CMatrix::from_real_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])
        ));
        assert_eq!(cn.index, 2);
    }

    #[test]
    fn projector_examples() {
        let (p, q) = projectors(&CMatrix::identity(3), &tol()).unwrap();
        assert!(close(&p, &CMatrix::identity(3)) && close(&q, &CMatrix::identity(3)));
        let (p, _) = projectors(&fixtures::a1(), &tol()).unwrap();
        assert!(close(&p, &CMatrix::diag_real(&[1.0, 1.0, 0.0])));
        let (p, q) = projectors(&CMatrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!((p, q), (CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)));
    }

    #[test]
    fn spectral_projector_examples() {
        let a = CMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 3.0]]);
        assert!(close(&spectral_projector(&a, &tol()).unwrap(), &CMatrix::identity(2)));
        assert_eq!(spectral_projector(&jordan(3), &tol()).unwrap(), CMatrix::zeros(3, 3));
        let p = spectral_projector(&fixtures::a1(), &tol()).unwrap();
        assert!(close(
            &p,
            &CMatrix::from_real_rows(&[[1.0, 0.0, 0.5], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        ));
        assert!((&(&p * &p) - &p).max_abs() < 1e-12);
    }

    #[test]
    fn drazin_properties_on_ensembles() {
        let t = tol();
        for (seed, class) in [
            (1, EnsembleClass::Generic),
            (2, EnsembleClass::FixedIndex(3)),
            (3, EnsembleClass::SimilarIndex(2)),
            (4, EnsembleClass::FixedRank(3)),
            (5, EnsembleClass::Nilpotent),
        ] {
            let spec = EnsembleSpec::new(6, 20, seed, class).unwrap();
            for a in gen(&spec).unwrap() {
                let k = index(&a, &t).unwrap();
                let ad = drazin(&a, &t).unwrap();
                let ak = a.pow(k).unwrap();
                let scale = (1.0 + a.frobenius_norm()).powi(3);
                let r1 = (&(&a.pow(k + 1).unwrap() * &ad) - &ak).frobenius_norm();
                let r2 = (&(&(&ad * &a) * &ad) - &ad).frobenius_norm();
                let r3 = a.commutator(&ad).unwrap().frobenius_norm();
                assert!(r1.max(r2).max(r3) <= 1e-8 * scale, "{class:?}: {r1:e} {r2:e} {r3:e}");

                let alt = drazin_with_exponent(&a, k + 1, &t).unwrap();
                assert!(approx_eq(&alt, &ad, &Tolerance::new(1e-10, 1e-7, t.rank_rel).unwrap()).unwrap());

                let rank = numerical_rank(&a, &t).unwrap();
                assert_eq!(k == 0, rank == a.rows());

                let cn = core_nilpotent(&a, &t).unwrap();
                let reference = crate::factor::spectral_norm(&a).unwrap().powi(k as i32);
                assert_eq!(
                    crate::factor::numerical_rank_scaled(&cn.core, reference, &t).unwrap(),
                    crate::factor::numerical_rank_scaled(&ak, reference, &t).unwrap()
                );
                assert!(cn.nilpotent.pow(k.max(1)).unwrap().frobenius_norm() <= 1e-8 * scale);
                assert!((&cn.core * &cn.nilpotent).frobenius_norm() <= 1e-8 * scale);
                assert!(projector_residual(&projectors(&a, &t).unwrap().0) <= 1e-9);
            }
        }
    }
}
