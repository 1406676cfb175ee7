//! Singular value decomposition, numerical rank, the Moore-Penrose inverse
//! and the Hartwig-Spindelböck decomposition.
//!
//! The SVD is a one-sided (Hestenes) Jacobi iteration on the columns of the
//! complex matrix. Factors are not phase-normalized; downstream code only
//! compares reconstructed products.

use num_complex::Complex64;
use serde::Serialize;

use crate::drazin::drazin_at_scale;
use crate::error::{GenInvError, Result};
use crate::geninv::core_ep_inv_at_scale;
use crate::numkernel::{CMatrix, Tolerance, C64};

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `m × m` unitary.
    pub u: CMatrix,
    /// `min(m, n)` singular values, nonincreasing.
    pub s: Vec<f64>,
    /// `n × n` unitary.
    pub v: CMatrix,
}

impl SvdResult {
    /// `U · diag(S) · V*` with the rectangular diagonal padded by zeros.
    pub fn reconstruct(&self) -> CMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let sigma = CMatrix::from_fn(m, n, |i, j| {
            if i == j {
                Complex64::new(self.s[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &(&self.u * &sigma) * &self.v.conj_transpose()
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Jacobi SVD of a matrix with at least as many rows as columns, returning
/// the columns `A·V` (mutually orthogonal) and the accumulated `V`.
fn jacobi_columns(a: &CMatrix) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>)> {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    let total: f64 = w.iter().map(|c| norm_sqr(c)).sum();
    // Columns below this squared norm are rounding noise and are left alone.
    let floor = (f64::EPSILON * f64::EPSILON) * total * 1e-4;
    let threshold = m as f64 * f64::EPSILON;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm_sqr(&w[p]);
                let beta = norm_sqr(&w[q]);
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                let g = gamma.norm();
                if g <= threshold * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                // Rotate the phase out of column q so the 2x2 Gram block is real.
                let phase = (gamma / g).conj();
                for z in w[q].iter_mut() {
                    *z *= phase;
                }
                for z in v[q].iter_mut() {
                    *z *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (wp, wq) = pair_mut(&mut w, p, q);
                rotate(wp, wq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(GenInvError::SvdNoConvergence { sweeps: MAX_SWEEPS })
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

fn rotate(x: &mut [C64], y: &mut [C64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = xa * c - yb * s;
        *b = xa * s + yb * c;
    }
}

/// Extends orthonormal columns to an orthonormal basis of `C^dim`.
fn complete_basis(mut cols: Vec<Vec<C64>>, dim: usize) -> Vec<Vec<C64>> {
    while cols.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..dim {
            let mut cand: Vec<C64> = (0..dim)
                .map(|i| Complex64::new(if i == e { 1.0 } else { 0.0 }, 0.0))
                .collect();
            for _ in 0..2 {
                for c in &cols {
                    let proj = dot(c, &cand);
                    for (x, y) in cand.iter_mut().zip(c) {
                        *x -= proj * y;
                    }
                }
            }
            let nrm = norm_sqr(&cand).sqrt();
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, cand) = best.expect("dim > 0");
        cols.push(cand.into_iter().map(|z| z / nrm).collect());
    }
    cols
}

fn columns_to_matrix(cols: &[Vec<C64>], rows: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.conj_transpose())?;
        return Ok(SvdResult {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let (w, v) = jacobi_columns(a)?;
    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, c)| (norm_sqr(c).sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let smax = order.first().map_or(0.0, |o| o.0);
    // Left vectors of negligible columns are not reliably orthogonal; the
    // basis completion supplies them instead.
    let usable = smax * f64::EPSILON * (m.max(n) as f64);
    let mut s = Vec::with_capacity(n);
    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut vcols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &(sigma, j) in &order {
        s.push(sigma);
        vcols.push(v[j].clone());
        if sigma > usable {
            ucols.push(w[j].iter().map(|z| z / sigma).collect());
        }
    }
    let u = columns_to_matrix(&complete_basis(ucols, m), m);
    Ok(SvdResult {
        u,
        s,
        v: columns_to_matrix(&vcols, n),
    })
}

fn rank_from_values(s: &[f64], m: usize, n: usize, reference: f64, tol: &Tolerance) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let cutoff = tol.rank_cutoff(m, n, smax.max(reference));
    s.iter().filter(|&&x| x > cutoff).count()
}

pub fn numerical_rank(a: &CMatrix, tol: &Tolerance) -> Result<usize> {
    numerical_rank_scaled(a, 0.0, tol)
}

/// Rank with the cutoff measured against `max(σ_max, reference)`. For a
/// computed product, `reference` is the product of the factor norms, so that
/// rounding noise is not mistaken for rank.
pub fn numerical_rank_scaled(a: &CMatrix, reference: f64, tol: &Tolerance) -> Result<usize> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0);
    }
    let d = svd(a)?;
    Ok(rank_from_values(&d.s, a.rows(), a.cols(), reference, tol))
}

pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    Ok(svd(a)?.s[0])
}

/// `‖M₁‖₂ · ‖M₂‖₂ · …`, the rank reference of the product `M₁M₂…`.
pub fn norm_product(ms: &[&CMatrix]) -> Result<f64> {
    ms.iter().try_fold(1.0, |acc, m| Ok(acc * spectral_norm(m)?))
}

/// Pseudoinverse of a computed product, with the factors as rank reference.
pub fn pinv_product(x: &CMatrix, factors: &[&CMatrix], tol: &Tolerance) -> Result<CMatrix> {
    pinv_scaled(x, norm_product(factors)?, tol)
}

/// Moore-Penrose inverse `V · diag(S⁺) · U*`, inverting only singular values
/// above the rank cutoff.
pub fn pinv(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    pinv_scaled(a, 0.0, tol)
}

/// [`pinv`] with the rank cutoff of [`numerical_rank_scaled`].
pub fn pinv_scaled(a: &CMatrix, reference: f64, tol: &Tolerance) -> Result<CMatrix> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(CMatrix::zeros(n, m));
    }
    let d = svd(a)?;
    let r = rank_from_values(&d.s, m, n, reference, tol);
    // X = Σ_{j<r} v_j u_j* / σ_j
    Ok(CMatrix::from_fn(n, m, |i, k| {
        (0..r)
            .map(|j| d.v.get(i, j) * d.u.get(k, j).conj() / d.s[j])
            .sum()
    }))
}

/// Factors of `A = U · [[ΣQ, ΣP], [0, 0]] · U*` with `QQ* + PP* = I_r`.
#[derive(Debug, Clone)]
pub struct HsDecomp {
    pub u: CMatrix,
    /// Positive nonincreasing singular values, length `r`.
    pub sigma: Vec<f64>,
    pub q: CMatrix,
    pub p: CMatrix,
    pub r: usize,
}

impl HsDecomp {
    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn sigma_matrix(&self) -> CMatrix {
        CMatrix::diag_real(&self.sigma)
    }

    pub fn sigma_inv_matrix(&self) -> CMatrix {
        CMatrix::diag_real(&self.sigma.iter().map(|s| 1.0 / s).collect::<Vec<_>>())
    }

    /// The `r × r` core `ΣQ`.
    pub fn sigma_q(&self) -> CMatrix {
        &self.sigma_matrix() * &self.q
    }

    pub fn sigma_p(&self) -> CMatrix {
        &self.sigma_matrix() * &self.p
    }

    /// `U · [[tl, tr], [bl, br]] · U*` for blocks partitioned as `r` and `n − r`.
    pub fn assemble(&self, tl: &CMatrix, tr: &CMatrix, bl: &CMatrix, br: &CMatrix) -> Result<CMatrix> {
        let inner = CMatrix::from_blocks(tl, tr, bl, br)?;
        Ok(&(&self.u * &inner) * &self.u.conj_transpose())
    }

    /// `U · [[X, Y], [0, 0]] · U*`.
    pub fn assemble_top(&self, x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
        let k = self.n() - self.r;
        self.assemble(x, y, &CMatrix::zeros(k, self.r), &CMatrix::zeros(k, k))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.assemble_top(&self.sigma_q(), &self.sigma_p())
            .expect("HS blocks are consistent by construction")
    }

    /// `‖QQ* + PP* − I_r‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = &(&self.q * &self.q.conj_transpose()) + &(&self.p * &self.p.conj_transpose());
        (&g - &CMatrix::identity(self.r)).frobenius_norm()
    }

    /// `A†` from the block formula `U · [[Q*Σ⁻¹, 0], [P*Σ⁻¹, 0]] · U*`.
    pub fn pinv_block_form(&self) -> CMatrix {
        let k = self.n() - self.r;
        let si = self.sigma_inv_matrix();
        self.assemble(
            &(&self.q.conj_transpose() * &si),
            &CMatrix::zeros(self.r, k),
            &(&self.p.conj_transpose() * &si),
            &CMatrix::zeros(k, k),
        )
        .expect("HS blocks are consistent by construction")
    }
}

pub fn hs_decompose(a: &CMatrix, tol: &Tolerance) -> Result<HsDecomp> {
    let n = a.ensure_square()?;
    let d = svd(a)?;
    let r = rank_from_values(&d.s, n, n, 0.0, tol);
    if r == 0 {
        return Err(GenInvError::ZeroMatrix);
    }
    let m = &d.v.conj_transpose() * &d.u;
    Ok(HsDecomp {
        q: m.submatrix(0, r, 0, r),
        p: m.submatrix(0, r, r, n),
        sigma: d.s[..r].to_vec(),
        u: d.u,
        r,
    })
}

/// Blocks derived from the core `ΣQ` of a Hartwig-Spindelböck decomposition.
#[derive(Debug, Clone)]
pub struct HsDerived {
    /// `(ΣQ)^d`
    pub core_drazin: CMatrix,
    /// `(ΣQ)^⊕`
    pub core_core_ep: CMatrix,
    /// `Q̂ = Q(ΣQ)^d`
    pub q_hat: CMatrix,
    /// `Σ̃ = Q̂((ΣQ)^d)²`
    pub sigma_tilde: CMatrix,
    /// `Q̃ = Q(ΣQ)^⊕`
    pub q_tilde: CMatrix,
    /// `Δ = Q̂Q̂†`
    pub delta: CMatrix,
    /// `Δ̂ = Σ̃Σ̃†`
    pub delta_hat: CMatrix,
    /// `Δ̃ = Q̃Q̃†`
    pub delta_tilde: CMatrix,
}

pub fn hs_derived(h: &HsDecomp, tol: &Tolerance) -> Result<HsDerived> {
    let core = h.sigma_q();
    let scale = h.sigma.first().copied().unwrap_or(0.0);
    let core_drazin = drazin_at_scale(&core, scale, tol)?;
    let core_core_ep = core_ep_inv_at_scale(&core, scale, tol)?;
    let q_hat = &h.q * &core_drazin;
    let sigma_tilde = &(&q_hat * &core_drazin) * &core_drazin;
    let q_tilde = &h.q * &core_core_ep;
    let cd = &core_drazin;
    let delta = &q_hat * &pinv_product(&q_hat, &[&h.q, cd], tol)?;
    let delta_hat = &sigma_tilde * &pinv_product(&sigma_tilde, &[&h.q, cd, cd, cd], tol)?;
    let delta_tilde = &q_tilde * &pinv_product(&q_tilde, &[&h.q, &core_core_ep], tol)?;
    Ok(HsDerived {
        core_drazin,
        core_core_ep,
        q_hat,
        sigma_tilde,
        q_tilde,
        delta,
        delta_hat,
        delta_tilde,
    })
}

/// Hermitian-and-idempotent residual `max(‖X − X*‖, ‖X² − X‖)`.
pub fn projector_residual(x: &CMatrix) -> f64 {
    let herm = (x - &x.conj_transpose()).frobenius_norm();
    let idem = (&(x * x) - x).frobenius_norm();
    herm.max(idem)
}

#[derive(Debug, Clone, Serialize)]
pub struct HsResiduals {
    pub reconstruction: f64,
    pub unitarity: f64,
}

pub fn hs_residuals(a: &CMatrix, h: &HsDecomp) -> HsResiduals {
    HsResiduals {
        reconstruction: (&h.reconstruct() - a).frobenius_norm(),
        unitarity: h.unitarity_residual(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_core_ep;
    use crate::fixtures;
    use crate::numkernel::approx_eq;
    use crate::verify::ensemble::{gen, EnsembleClass, EnsembleSpec};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn unitary_check(u: &CMatrix) -> f64 {
        (&(&u.conj_transpose() * u) - &CMatrix::identity(u.cols())).frobenius_norm()
    }

    #[test]
    fn svd_diagonal() {
        let d = svd(&CMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert!((d.s[0] - 3.0).abs() < 1e-14 && (d.s[1] - 1.0).abs() < 1e-14);
        assert!(approx_eq(&d.reconstruct(), &CMatrix::diag_real(&[3.0, 1.0]), &tol()).unwrap());
    }

    #[test]
    fn svd_a1_reconstructs_with_zero_tail() {
        let a = fixtures::a1();
        let d = svd(&a).unwrap();
        assert!((&d.reconstruct() - &a).frobenius_norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
        assert!(d.s[2] < 1e-14);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        assert!(unitary_check(&d.u) < 1e-12 && unitary_check(&d.v) < 1e-12);
    }

    #[test]
    fn svd_zero_rectangular() {
        let d = svd(&CMatrix::zeros(2, 3)).unwrap();
        assert_eq!(d.s, vec![0.0, 0.0]);
        assert_eq!(d.u.shape(), (2, 2));
        assert_eq!(d.v.shape(), (3, 3));
        assert!(unitary_check(&d.u) < 1e-14 && unitary_check(&d.v) < 1e-14);
    }

    #[test]
    fn svd_complex_wide_and_tall() {
        let a = CMatrix::from_fn(2, 4, |i, j| Complex64::new(i as f64 - j as f64, (i * j) as f64 + 0.5));
        for m in [a.clone(), a.conj_transpose()] {
            let d = svd(&m).unwrap();
            assert!((&d.reconstruct() - &m).frobenius_norm() < 1e-12);
            assert!(unitary_check(&d.u) < 1e-12 && unitary_check(&d.v) < 1e-12);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&fixtures::a1(), &tol()).unwrap(), 2);
        assert_eq!(numerical_rank(&CMatrix::identity(5), &tol()).unwrap(), 5);
        assert_eq!(numerical_rank(&fixtures::a3(), &tol()).unwrap(), 2);
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 2), &tol()).unwrap(), 0);
    }

    #[test]
    fn pinv_fixtures() {
        let expect1 = CMatrix::from_real_rows(&[[0.5, -0.25, 0.0], [0.0, 0.0, 0.0], [0.0, 0.5, 0.0]]);
        let expect2 = CMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [-1.0, 1.0, 0.0]]);
        assert!((&pinv(&fixtures::a1(), &tol()).unwrap() - &expect1).max_abs() < 1e-12);
        assert!((&pinv(&fixtures::a2(), &tol()).unwrap() - &expect2).max_abs() < 1e-12);
        assert_eq!(pinv(&CMatrix::zeros(2, 3), &tol()).unwrap(), CMatrix::zeros(3, 2));
    }

    #[test]
    fn hs_a1_and_a3() {
        for a in [fixtures::a1(), fixtures::a3()] {
            let h = hs_decompose(&a, &tol()).unwrap();
            assert_eq!(h.r, 2);
            let res = hs_residuals(&a, &h);
            assert!(res.reconstruction <= 1e-10, "{res:?}");
            assert!(res.unitarity <= 1e-10, "{res:?}");
            assert!(approx_eq(&h.pinv_block_form(), &pinv(&a, &tol()).unwrap(), &tol()).unwrap());
        }
    }

    #[test]
    fn hs_unitary_has_identity_sigma_and_empty_p() {
        let s = 0.5f64.sqrt();
        let u = CMatrix::new(
            2,
            2,
            vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, s),
                Complex64::new(s, 0.0),
            ],
        )
        .unwrap();
        let h = hs_decompose(&u, &tol()).unwrap();
        assert_eq!(h.r, 2);
        assert!(h.sigma.iter().all(|s| (s - 1.0).abs() < 1e-14));
        assert_eq!(h.p.shape(), (2, 0));
        assert!(unitary_check(&h.q) < 1e-12);
        assert!(approx_eq(&h.reconstruct(), &u, &tol()).unwrap());
    }

    #[test]
    fn hs_zero_matrix_rejected() {
        assert_eq!(hs_decompose(&CMatrix::zeros(3, 3), &tol()).unwrap_err(), GenInvError::ZeroMatrix);
        assert!(matches!(
            hs_decompose(&CMatrix::zeros(2, 3), &tol()),
            Err(GenInvError::NotSquare { .. })
        ));
    }

    #[test]
    fn derived_blocks_are_projectors() {
        let h = hs_decompose(&fixtures::a1(), &tol()).unwrap();
        let d = hs_derived(&h, &tol()).unwrap();
        for p in [&d.delta, &d.delta_hat, &d.delta_tilde] {
            assert!(projector_residual(p) <= 1e-10);
        }
    }

    #[test]
    fn derived_blocks_nonsingular() {
        let a = CMatrix::from_real_rows(&[[2.0, 1.0], [0.5, 3.0]]);
        let h = hs_decompose(&a, &tol()).unwrap();
        let d = hs_derived(&h, &tol()).unwrap();
        let core_inv = pinv(&h.sigma_q(), &tol()).unwrap();
        assert!(approx_eq(&d.q_hat, &(&h.q * &core_inv), &tol()).unwrap());
        assert!(approx_eq(&d.delta, &CMatrix::identity(2), &tol()).unwrap());
    }

    #[test]
    fn derived_p_star_qhat_tracks_core_ep() {
        let t = tol();
        let h = hs_decompose(&fixtures::a3(), &t).unwrap();
        let d = hs_derived(&h, &t).unwrap();
        // A3 is not core-EP, yet P*Q̂ vanishes: only Q*Q̂ = (ΣQ)^d fails.
        let resid = (&h.p.conj_transpose() * &d.q_hat).frobenius_norm();
        assert!(resid <= 1e-9);
        assert!(!is_core_ep(&fixtures::a3(), &t).unwrap().holds);
        let qs_qhat = &h.q.conj_transpose() * &d.q_hat;
        assert!((&qs_qhat - &d.core_drazin).frobenius_norm() > 0.1);

        let spec = EnsembleSpec::new(5, 10, 3, EnsembleClass::CoreEp).unwrap();
        for a in gen(&spec).unwrap() {
            let h = hs_decompose(&a, &t).unwrap();
            let d = hs_derived(&h, &t).unwrap();
            assert!((&h.p.conj_transpose() * &d.q_hat).frobenius_norm() <= 1e-8);
        }
    }

    #[test]
    fn lemma_dd_on_random_samples() {
        let t = tol();
        for class in [EnsembleClass::CoreEp, EnsembleClass::SimilarIndex(2), EnsembleClass::IdempotentCore] {
            let spec = EnsembleSpec::new(4, 20, 11, class).unwrap();
            for a in gen(&spec).unwrap() {
                let h = hs_decompose(&a, &t).unwrap();
                let d = hs_derived(&h, &t).unwrap();
                let dp = (&d.delta * &h.p).frobenius_norm();
                if dp <= 1e-9 {
                    let pdq = (&(&h.p.conj_transpose() * &d.delta) * &h.q).frobenius_norm();
                    assert!(pdq <= 1e-9);
                }
            }
        }
    }
}
