//! Composite generalized inverses built from Moore-Penrose and Drazin products.
//!
//! Every inverse is computed by direct composition. The Hartwig-Spindelböck
//! block formulas in [`BlockForms`] are independent cross-checks only.

use crate::drazin::{drazin_at_scale, drazin_with_exponent, index, index_at_scale};
use crate::error::{GenInvError, Result};
use crate::factor::{hs_decompose, hs_derived, numerical_rank, pinv, pinv_product, pinv_scaled, spectral_norm, HsDecomp, HsDerived};
use crate::numkernel::{scaled_residual, CMatrix, Tolerance};

/// All generalized inverses of one square matrix.
#[derive(Debug, Clone)]
pub struct InverseReport {
    /// `A†`
    pub mp: CMatrix,
    /// `A^d`
    pub drazin: CMatrix,
    /// `A^{d,†} = A^d A A†`
    pub dmp: CMatrix,
    /// `A^{†,d} = A† A A^d`
    pub mpd: CMatrix,
    /// `A^{c,†} = A† A_c A†`
    pub cmp: CMatrix,
    /// `A^{†,d,†} = A† A^d A†`
    pub mpdmp: CMatrix,
    /// `A^⊕ = A^d A^k (A^k)†`
    pub core_ep: CMatrix,
    /// `A^{C,⊕} = A† A A^⊕ A A†`
    pub cce: CMatrix,
    /// Core part `A_c = A A^d A`.
    pub core: CMatrix,
    pub index: usize,
    pub rank: usize,
}

impl InverseReport {
    pub fn compute(a: &CMatrix, tol: &Tolerance) -> Result<Self> {
        a.ensure_square()?;
        let k = index(a, tol)?;
        let rank = numerical_rank(a, tol)?;
        let mp = pinv(a, tol)?;
        let drazin = drazin_with_exponent(a, k, tol)?;
        let core = &(a * &drazin) * a;
        let dmp = &(&drazin * a) * &mp;
        let mpd = &(&mp * a) * &drazin;
        let cmp = &(&mp * &core) * &mp;
        let mpdmp = &(&mp * &drazin) * &mp;
        let core_ep = core_ep_from(a, &drazin, k, 0.0, tol)?;
        let cce = &(&(&(&mp * a) * &core_ep) * a) * &mp;
        Ok(Self {
            mp,
            drazin,
            dmp,
            mpd,
            cmp,
            mpdmp,
            core_ep,
            cce,
            core,
            index: k,
            rank,
        })
    }

    /// Looks an inverse up by its command-line name.
    pub fn get(&self, name: &str) -> Option<&CMatrix> {
        Some(match name {
            "mp" => &self.mp,
            "drazin" => &self.drazin,
            "dmp" => &self.dmp,
            "mpd" => &self.mpd,
            "cmp" => &self.cmp,
            "mpdmp" => &self.mpdmp,
            "core-ep" | "core_ep" => &self.core_ep,
            "cce" => &self.cce,
            _ => return None,
        })
    }
}

fn core_ep_from(a: &CMatrix, ad: &CMatrix, k: usize, scale: f64, tol: &Tolerance) -> Result<CMatrix> {
    let ak = a.pow(k)?;
    let reference = spectral_norm(a)?.max(scale).powi(k as i32);
    Ok(&(ad * &ak) * &pinv_scaled(&ak, reference, tol)?)
}

pub fn dmp(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(InverseReport::compute(a, tol)?.dmp)
}

pub fn mpd(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(InverseReport::compute(a, tol)?.mpd)
}

pub fn cmp(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(InverseReport::compute(a, tol)?.cmp)
}

pub fn mpdmp(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(InverseReport::compute(a, tol)?.mpdmp)
}

pub fn core_ep_inv(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    core_ep_inv_at_scale(a, 0.0, tol)
}

/// [`core_ep_inv`] with the rank cutoffs of [`index_at_scale`].
pub fn core_ep_inv_at_scale(a: &CMatrix, scale: f64, tol: &Tolerance) -> Result<CMatrix> {
    let k = index_at_scale(a, scale, tol)?;
    let ad = drazin_at_scale(a, scale, tol)?;
    core_ep_from(a, &ad, k, scale, tol)
}

pub fn cce(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(InverseReport::compute(a, tol)?.cce)
}

/// `(A^{†,d,†})†` computed directly and from `U·[[Σ̃†Q, Σ̃†P], [0, 0]]·U*`.
#[derive(Debug, Clone)]
pub struct DualPath {
    pub direct: CMatrix,
    pub closed_form: CMatrix,
    /// `‖direct − closed_form‖_F`
    pub residual: f64,
    /// Residual divided by the tolerance bound; `≤ 1` means agreement.
    pub scaled: f64,
}

pub fn mpdmp_pinv_dual(a: &CMatrix, tol: &Tolerance) -> Result<DualPath> {
    let h = hs_decompose(a, tol)?;
    let d = hs_derived(&h, tol)?;
    let r = InverseReport::compute(a, tol)?;
    let direct = pinv_product(&r.mpdmp, &[&r.mp, &r.drazin, &r.mp], tol)?;
    let cd = &d.core_drazin;
    let st_pinv = pinv_product(&d.sigma_tilde, &[&h.q, cd, cd, cd], tol)?;
    let closed_form = h.assemble_top(&(&st_pinv * &h.q), &(&st_pinv * &h.p))?;
    let residual = (&direct - &closed_form).frobenius_norm();
    let scaled = scaled_residual(&direct, &closed_form, tol)?;
    Ok(DualPath {
        direct,
        closed_form,
        residual,
        scaled,
    })
}

/// Moore-Penrose inverse of the MPDMP matrix, checked against its closed form.
pub fn mpdmp_pinv(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let dual = mpdmp_pinv_dual(a, tol)?;
    if dual.scaled > 1.0 {
        return Err(GenInvError::ClosedFormMismatch {
            residual: dual.residual,
        });
    }
    Ok(dual.direct)
}

/// Greville-type expressions `(A^k (A^{2k+1})† A^{k+1} A†, A† A^{k+1} (A^{2k+1})† A^k)`
/// for the DMP and MPD inverses.
pub fn greville_forms(a: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    let k = index(a, tol)?;
    let ak = a.pow(k)?;
    let ak1 = &ak * a;
    let mid = pinv_scaled(&a.pow(2 * k + 1)?, spectral_norm(a)?.powi(2 * k as i32 + 1), tol)?;
    let ap = pinv(a, tol)?;
    let dmp = &(&(&ak * &mid) * &ak1) * &ap;
    let mpd = &(&(&ap * &ak1) * &mid) * &ak;
    Ok((dmp, mpd))
}

/// Hartwig-Spindelböck block expressions of the inverses.
#[derive(Debug, Clone)]
pub struct BlockForms {
    pub mp: CMatrix,
    pub drazin: CMatrix,
    pub core: CMatrix,
    pub dmp: CMatrix,
    pub mpd: CMatrix,
    pub mpdmp: CMatrix,
}

pub fn block_forms(h: &HsDecomp, d: &HsDerived) -> Result<BlockForms> {
    let (q, p) = (&h.q, &h.p);
    let qs = q.conj_transpose();
    let ps = p.conj_transpose();
    let cd = &d.core_drazin;
    let sp = h.sigma_p();
    let k = h.n() - h.r;
    let z_rk = CMatrix::zeros(h.r, k);

    let drazin = h.assemble_top(cd, &(&(cd * cd) * &sp))?;
    let s = h.sigma_matrix();
    let sqh = &s * &d.q_hat;
    let core = h.assemble_top(&(&sqh * &h.sigma_q()), &(&sqh * &sp))?;
    let dmp = h.assemble_top(cd, &z_rk)?;
    let qsqh = &qs * &d.q_hat;
    let psqh = &ps * &d.q_hat;
    let tail = cd * &sp;
    let mpd = h.assemble(&qsqh, &(&qsqh * &tail), &psqh, &(&psqh * &tail))?;
    let mpdmp = h.assemble(
        &(&qs * &d.sigma_tilde),
        &z_rk,
        &(&ps * &d.sigma_tilde),
        &CMatrix::zeros(k, k),
    )?;
    Ok(BlockForms {
        mp: h.pinv_block_form(),
        drazin,
        core,
        dmp,
        mpd,
        mpdmp,
    })
}
