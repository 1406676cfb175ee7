//! Matrix classes (EP, core-EP, k-EP) and EP-ness criteria for the composite
//! inverses.
//!
//! Each criterion is evaluated twice: through Hartwig-Spindelböck block
//! conditions and through the intrinsic test on the inverse itself. A
//! disagreement between the two is reported as a warning, never resolved
//! silently.

use serde::Serialize;

use crate::error::{GenInvError, Result};
use crate::factor::{hs_derived, pinv_product, HsDecomp, HsDerived};
use crate::geninv::InverseReport;
use crate::numkernel::{CMatrix, Check, Tolerance};

#[derive(Debug, Clone, Serialize)]
pub struct Labeled {
    pub label: &'static str,
    #[serde(flatten)]
    pub check: Check,
}

impl Labeled {
    fn new(label: &'static str, check: Check) -> Self {
        Self { label, check }
    }
}

fn all_hold(items: &[Labeled]) -> bool {
    items.iter().all(|l| l.check.holds)
}

/// `X` is EP when `XX† = X†X`.
pub fn ep_check(x: &CMatrix, tol: &Tolerance) -> Result<Check> {
    ep_check_product(x, &[], tol)
}

/// [`ep_check`] for a computed product `X` of the given factors.
pub fn ep_check_product(x: &CMatrix, factors: &[&CMatrix], tol: &Tolerance) -> Result<Check> {
    x.ensure_square()?;
    let xp = pinv_product(x, factors, tol)?;
    Check::eq(&(x * &xp), &(&xp * x), tol)
}

impl InverseReport {
    /// Factors of `A^{c,†} = A†A_cA†`.
    fn cmp_factors(&self) -> [&CMatrix; 3] {
        [&self.mp, &self.core, &self.mp]
    }
}

pub fn is_ep(a: &CMatrix, tol: &Tolerance) -> Result<Check> {
    ep_check(a, tol)
}

// Rounding in A†A_c grows with ‖A†‖·‖A_c‖ rather than with either product.
fn core_ep_check(r: &InverseReport, tol: &Tolerance) -> Result<Check> {
    let scale = r.mp.frobenius_norm() * r.core.frobenius_norm();
    Check::eq_scaled(&(&r.mp * &r.core), &(&r.core * &r.mp), scale, tol)
}

/// `A†A_c = A_cA†`.
pub fn is_core_ep(a: &CMatrix, tol: &Tolerance) -> Result<Check> {
    let r = InverseReport::compute(a, tol)?;
    core_ep_check(&r, tol)
}

/// `A^kA† = A†A^k` with `k = Ind(A)`.
pub fn is_k_ep(a: &CMatrix, tol: &Tolerance) -> Result<Check> {
    let r = InverseReport::compute(a, tol)?;
    k_ep_check(a, &r, tol)
}

fn k_ep_check(a: &CMatrix, r: &InverseReport, tol: &Tolerance) -> Result<Check> {
    let ak = a.pow(r.index)?;
    let scale = ak.frobenius_norm() * r.mp.frobenius_norm();
    Check::eq_scaled(&(&ak * &r.mp), &(&r.mp * &ak), scale, tol)
}

/// The three block conditions equivalent to core-EPness.
#[derive(Debug, Clone, Serialize)]
pub struct BlockConditions {
    /// `Q*Q̂ = (ΣQ)^d`
    pub a: Labeled,
    /// `P*Q̂ = 0`
    pub b: Labeled,
    /// `(ΣQ)^d ΣP = 0`
    pub c: Labeled,
}

impl BlockConditions {
    pub fn all(&self) -> bool {
        self.a.check.holds && self.b.check.holds && self.c.check.holds
    }
}

fn block_conditions_from(h: &HsDecomp, d: &HsDerived, tol: &Tolerance) -> Result<BlockConditions> {
    let qs = h.q.conj_transpose();
    let ps = h.p.conj_transpose();
    let qh = d.q_hat.frobenius_norm();
    let sp = h.sigma_p();
    Ok(BlockConditions {
        a: Labeled::new(
            "Q*Q^ = (SQ)^d",
            Check::eq_scaled(&(&qs * &d.q_hat), &d.core_drazin, qh, tol)?,
        ),
        b: Labeled::new("P*Q^ = 0", Check::zero(&(&ps * &d.q_hat), qh, tol)),
        c: Labeled::new(
            "(SQ)^d SP = 0",
            Check::zero(
                &(&d.core_drazin * &sp),
                d.core_drazin.frobenius_norm() * sp.frobenius_norm(),
                tol,
            ),
        ),
    })
}

pub fn core_ep_block_conditions(h: &HsDecomp, tol: &Tolerance) -> Result<BlockConditions> {
    let d = hs_derived(h, tol)?;
    block_conditions_from(h, &d, tol)
}

/// Class membership of one matrix together with every core-EP characterization.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub rank: usize,
    pub index: usize,
    pub is_ep: Check,
    pub is_core_ep: Check,
    pub is_k_ep: Check,
    /// Seven equivalent forms of core-EPness, (i) being the definition.
    pub core_ep_conditions: Vec<Labeled>,
    /// `None` for the zero matrix, which has no Hartwig-Spindelböck form.
    pub block_conditions: Option<BlockConditions>,
    pub warnings: Vec<String>,
}

impl ClassReport {
    pub fn conditions_agree(&self) -> bool {
        self.core_ep_conditions
            .iter()
            .all(|c| c.check.holds == self.is_core_ep.holds)
    }
}

/// The seven equivalent core-EP conditions evaluated from precomputed inverses.
pub fn core_ep_conditions(a: &CMatrix, r: &InverseReport, tol: &Tolerance) -> Result<Vec<Labeled>> {
    let m = &r.mpdmp;
    let d = &r.drazin;
    let d2 = d * d;
    let d3 = &d2 * d;
    let d4 = &d2 * &d2;
    let dmp2 = &r.dmp * &r.dmp;
    let dmp4 = &dmp2 * &dmp2;
    let (mn, dn) = (m.frobenius_norm(), d.frobenius_norm());
    Ok(vec![
        Labeled::new("(i) A^+ A_c = A_c A^+", core_ep_check(r, tol)?),
        Labeled::new("(ii) A^{+,d,+} = (A^d)^3", Check::eq(m, &d3, tol)?),
        Labeled::new(
            "(iii) A^{+,d,+} A^{d,+} = (A^d)^4",
            Check::eq_scaled(&(m * &r.dmp), &d4, mn * r.dmp.frobenius_norm(), tol)?,
        ),
        Labeled::new(
            "(iv) A^{+,d,+} A = A A^{+,d,+}",
            Check::eq_scaled(&(m * a), &(a * m), mn * a.frobenius_norm(), tol)?,
        ),
        Labeled::new(
            "(v) A^{+,d,+} A_c = A_c A^{+,d,+}",
            Check::eq_scaled(&(m * &r.core), &(&r.core * m), mn * r.core.frobenius_norm(), tol)?,
        ),
        Labeled::new(
            "(vi) A^{+,d,+} A^d = A^d A^{+,d,+}",
            Check::eq_scaled(&(m * d), &(d * m), mn * dn, tol)?,
        ),
        Labeled::new(
            "(vii) A^{+,d,+} A^d = (A^{d,+})^4",
            Check::eq_scaled(&(m * d), &dmp4, mn * dn, tol)?,
        ),
    ])
}

pub fn core_ep_equiv_report(a: &CMatrix, tol: &Tolerance) -> Result<ClassReport> {
    let r = InverseReport::compute(a, tol)?;
    let conditions = core_ep_conditions(a, &r, tol)?;
    let is_core_ep = conditions[0].check;
    let block_conditions = if r.rank > 0 {
        let h = crate::factor::hs_decompose(a, tol)?;
        Some(core_ep_block_conditions(&h, tol)?)
    } else {
        None
    };
    let mut warnings = Vec::new();
    for c in &conditions[1..] {
        if c.check.holds != is_core_ep.holds {
            warnings.push(format!(
                "condition {} = {} disagrees with core-EP = {} (residual {:e}, bound {:e})",
                c.label, c.check.holds, is_core_ep.holds, c.check.residual, c.check.bound
            ));
        }
    }
    if let Some(b) = &block_conditions {
        if b.all() != is_core_ep.holds {
            warnings.push(format!(
                "block conditions (a)(b)(c) = {} disagree with core-EP = {}",
                b.all(),
                is_core_ep.holds
            ));
        }
    }
    Ok(ClassReport {
        rank: r.rank,
        index: r.index,
        is_ep: ep_check(a, tol)?,
        is_core_ep,
        is_k_ep: k_ep_check(a, &r, tol)?,
        core_ep_conditions: conditions,
        block_conditions,
        warnings,
    })
}

/// A block-level criterion paired with the intrinsic test it characterizes.
#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub holds: bool,
    pub conditions: Vec<Labeled>,
    pub direct: Check,
    /// Implications asserted only when the criterion holds.
    pub consequences: Vec<Labeled>,
    pub warnings: Vec<String>,
}

impl Criterion {
    fn new(conditions: Vec<Labeled>, direct: Check, what: &str) -> Self {
        let holds = all_hold(&conditions);
        let mut warnings = Vec::new();
        if holds != direct.holds {
            warnings.push(format!(
                "{what}: block criterion = {holds} but direct test = {} (residual {:e}, bound {:e})",
                direct.holds, direct.residual, direct.bound
            ));
        }
        Self {
            holds,
            conditions,
            direct,
            consequences: Vec::new(),
            warnings,
        }
    }

    pub fn agrees(&self) -> bool {
        self.holds == self.direct.holds
    }
}

struct Ctx {
    a: CMatrix,
    inv: InverseReport,
    d: HsDerived,
}

fn ctx(h: &HsDecomp, tol: &Tolerance) -> Result<Ctx> {
    let a = h.reconstruct();
    Ok(Ctx {
        inv: InverseReport::compute(&a, tol)?,
        d: hs_derived(h, tol)?,
        a,
    })
}

/// `Q*MQ = X†X` and `MP = 0` for a projector `M = XX†`.
fn projector_pair(
    h: &HsDecomp,
    m: &CMatrix,
    x: &CMatrix,
    factors: &[&CMatrix],
    labels: (&'static str, &'static str),
    tol: &Tolerance,
) -> Result<Vec<Labeled>> {
    let lhs = &(&h.q.conj_transpose() * m) * &h.q;
    let xp = pinv_product(x, factors, tol)?;
    let rhs = &xp * x;
    let mn = m.frobenius_norm();
    Ok(vec![
        Labeled::new(labels.0, Check::eq_scaled(&lhs, &rhs, mn, tol)?),
        Labeled::new(labels.1, Check::zero(&(m * &h.p), mn, tol)),
    ])
}

/// `[PP*, M] = 0`, `[QQ*, M] = 0`, `M = Q X†X Q*` for the projector `M = XX†`.
fn projector_consequences(
    h: &HsDecomp,
    m: &CMatrix,
    x: &CMatrix,
    factors: &[&CMatrix],
    tol: &Tolerance,
) -> Result<Vec<Labeled>> {
    let pp = &h.p * &h.p.conj_transpose();
    let qq = &h.q * &h.q.conj_transpose();
    let xp = pinv_product(x, factors, tol)?;
    let rhs = &(&(&h.q * &xp) * x) * &h.q.conj_transpose();
    let mn = m.frobenius_norm();
    Ok(vec![
        Labeled::new("[PP*, M] = 0", Check::zero(&pp.commutator(m)?, mn, tol)),
        Labeled::new("[QQ*, M] = 0", Check::zero(&qq.commutator(m)?, mn, tol)),
        Labeled::new("M = Q X^+X Q*", Check::eq(m, &rhs, tol)?),
    ])
}

/// `A^{c,†}` is EP iff `Q*ΔQ = Q̂†Q̂` and `ΔP = 0`; the third condition
/// `P*ΔQ = 0` follows from `ΔP = 0` and is not evaluated.
pub fn cmp_ep_criterion(h: &HsDecomp, tol: &Tolerance) -> Result<Criterion> {
    let c = ctx(h, tol)?;
    let qf = [&h.q, &c.d.core_drazin];
    let conditions = projector_pair(h, &c.d.delta, &c.d.q_hat, &qf, ("Q*DQ = Q^+Q^", "DP = 0"), tol)?;
    let direct = ep_check_product(&c.inv.cmp, &c.inv.cmp_factors(), tol)?;
    Ok(Criterion::new(conditions, direct, "CMP EP criterion"))
}

/// `A^{†,d,†}` is EP iff `Q*Δ̂Q = Σ̃†Σ̃` and `Δ̂P = 0`.
pub fn mpdmp_ep_criterion(h: &HsDecomp, tol: &Tolerance) -> Result<Criterion> {
    let c = ctx(h, tol)?;
    let cd = &c.d.core_drazin;
    let sf = [&h.q, cd, cd, cd];
    let conditions = projector_pair(h, &c.d.delta_hat, &c.d.sigma_tilde, &sf, ("Q*D^Q = S~^+S~", "D^P = 0"), tol)?;
    let direct = ep_check_product(&c.inv.mpdmp, &[&c.inv.mp, &c.inv.drazin, &c.inv.mp], tol)?;
    Ok(Criterion::new(conditions, direct, "MPDMP EP criterion"))
}

/// Residuals of `[PP*, Δ̂]`, `[QQ*, Δ̂]` and `Δ̂ − QΣ̃†Σ̃Q*`, defined only when
/// the MPDMP matrix is EP.
pub fn mpdmp_ep_consequences(h: &HsDecomp, tol: &Tolerance) -> Result<(f64, f64, f64)> {
    let crit = mpdmp_ep_criterion(h, tol)?;
    if !crit.holds {
        return Err(GenInvError::PreconditionViolated(
            "MPDMP EP criterion does not hold".into(),
        ));
    }
    let d = hs_derived(h, tol)?;
    let cd = &d.core_drazin;
    let c = projector_consequences(h, &d.delta_hat, &d.sigma_tilde, &[&h.q, cd, cd, cd], tol)?;
    Ok((c[0].check.residual, c[1].check.residual, c[2].check.residual))
}

/// `A^{C,⊕}` is EP iff `Q*Δ̃Q = Q̃†Q̃` and `Δ̃P = 0`. When it holds the three
/// commutation consequences are evaluated as well.
pub fn cce_ep_criterion(h: &HsDecomp, tol: &Tolerance) -> Result<Criterion> {
    let c = ctx(h, tol)?;
    let tf = [&h.q, &c.d.core_core_ep];
    let conditions = projector_pair(h, &c.d.delta_tilde, &c.d.q_tilde, &tf, ("Q*D~Q = Q~^+Q~", "D~P = 0"), tol)?;
    let i = &c.inv;
    let direct = ep_check_product(&i.cce, &[&i.mp, &c.a, &i.core_ep, &c.a, &i.mp], tol)?;
    let mut crit = Criterion::new(conditions, direct, "CCE EP criterion");
    if crit.holds {
        crit.consequences = projector_consequences(h, &c.d.delta_tilde, &c.d.q_tilde, &tf, tol)?;
        for l in &crit.consequences {
            if !l.check.holds {
                crit.warnings.push(format!("CCE consequence {} fails (residual {:e})", l.label, l.check.residual));
            }
        }
    }
    Ok(crit)
}

fn dmp_pinv_commute_direct(c: &Ctx, tol: &Tolerance) -> Result<Check> {
    let i = &c.inv;
    let dmpp = pinv_product(&i.dmp, &[&i.drazin, &c.a, &i.mp], tol)?;
    let d = &c.inv.drazin;
    Check::eq_scaled(&(&dmpp * d), &(d * &dmpp), dmpp.frobenius_norm() * d.frobenius_norm(), tol)
}

fn core_drazin_is_ep(c: &Ctx, tol: &Tolerance) -> Result<Labeled> {
    Ok(Labeled::new("(SQ)^d is EP", ep_check(&c.d.core_drazin, tol)?))
}

/// `(A^{d,†})†A^d = A^d(A^{d,†})†` iff `(ΣQ)^d` is EP and `QΣP = 0`.
///
/// This is the simplified form of the criterion. It is known to disagree with
/// the direct test on some inputs (e.g. nilpotent matrices with `QΣP ≠ 0`);
/// [`dmp_pinv_commute_criterion_unsimplified`] evaluates the form
/// `(ΣQ)^d ΣP = 0` from which it was obtained.
pub fn dmp_pinv_commute_criterion(h: &HsDecomp, tol: &Tolerance) -> Result<Criterion> {
    let c = ctx(h, tol)?;
    let qsp = &(&h.q * &h.sigma_matrix()) * &h.p;
    let scale = h.sigma.first().copied().unwrap_or(0.0);
    let conditions = vec![
        core_drazin_is_ep(&c, tol)?,
        Labeled::new("QSP = 0", Check::zero(&qsp, scale, tol)),
    ];
    Ok(Criterion::new(
        conditions,
        dmp_pinv_commute_direct(&c, tol)?,
        "DMP pseudoinverse commutation criterion",
    ))
}

/// Same commutation test with the condition `(ΣQ)^d ΣP = 0`.
pub fn dmp_pinv_commute_criterion_unsimplified(h: &HsDecomp, tol: &Tolerance) -> Result<Criterion> {
    let c = ctx(h, tol)?;
    let sp = h.sigma_p();
    let cd = &c.d.core_drazin;
    let conditions = vec![
        core_drazin_is_ep(&c, tol)?,
        Labeled::new(
            "(SQ)^d SP = 0",
            Check::zero(&(cd * &sp), cd.frobenius_norm() * sp.frobenius_norm(), tol),
        ),
    ];
    Ok(Criterion::new(
        conditions,
        dmp_pinv_commute_direct(&c, tol)?,
        "DMP pseudoinverse commutation criterion (unsimplified)",
    ))
}

/// `A^{c,†}` is EP iff `A^{†,d}(A^{c,†})† = (A^{c,†})†A^{d,†}`.
pub fn wqrt_criterion(a: &CMatrix, tol: &Tolerance) -> Result<Criterion> {
    a.ensure_square()?;
    let r = InverseReport::compute(a, tol)?;
    if r.rank == 0 {
        return Err(GenInvError::ZeroMatrix);
    }
    let cp = pinv_product(&r.cmp, &r.cmp_factors(), tol)?;
    let cn = cp.frobenius_norm();
    let check = Check::eq_scaled(
        &(&r.mpd * &cp),
        &(&cp * &r.dmp),
        cn * r.mpd.frobenius_norm().max(r.dmp.frobenius_norm()),
        tol,
    )?;
    Ok(Criterion::new(
        vec![Labeled::new("A^{+,d}(A^{c,+})^+ = (A^{c,+})^+ A^{d,+}", check)],
        ep_check_product(&r.cmp, &r.cmp_factors(), tol)?,
        "CMP EP commutation criterion",
    ))
}
