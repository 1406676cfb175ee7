//! Theorem suites run over seeded ensembles.
//!
//! Every biconditional is tested in both directions: a sample fails when the
//! two sides disagree, whichever side holds. Statements with a hypothesis
//! skip samples that do not satisfy it.

use rayon::prelude::*;

use super::ensemble::{gaussian, gen_at, sample_rng, sample_seed, EnsembleSpec};
use super::exact::{ExactInverses, RMatrix};
use super::systems::{system_outcomes_for, System};
use super::{Outcome, VerificationReport};
use crate::classify::{
    cce_ep_criterion, cmp_ep_criterion, core_ep_equiv_report, dmp_pinv_commute_criterion,
    dmp_pinv_commute_criterion_unsimplified, ep_check_product, is_core_ep, is_k_ep, mpdmp_ep_criterion,
    wqrt_criterion, Criterion,
};
use crate::drazin::{drazin, index};
use crate::error::{GenInvError, Result};
use crate::factor::{hs_decompose, hs_derived, pinv, pinv_product};
use crate::geninv::{block_forms, greville_forms, mpdmp_pinv_dual, InverseReport};
use crate::numkernel::{CMatrix, Check, Tolerance};
use crate::orders::{core_upper_bound_check, dmp_order_characterizations, leq_all, mpd_order_characterizations, upper_bound_from};

/// Relative residual accepted for closed-form dual paths.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Entrywise agreement accepted between the floating kernel and the oracle.
pub const ORACLE_TOL: f64 = 1e-8;
/// Scale factor of the Penrose and Drazin residual bound `c·(1+‖A‖)³`.
pub const PROPERTY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    CoreEpEquiv,
    CoreEpCollapse,
    SixPart,
    Ass,
    FiveWayMp,
    FiveWayCore,
    CommuteLemma,
    Ew2,
    Adf,
    OrdersKep,
    CceConditional,
    EpCriteria,
    PenroseDrazin,
    ClosedForms,
    Oracle,
    Systems,
}

impl Suite {
    pub const ALL: [Suite; 16] = [
        Suite::CoreEpEquiv,
        Suite::CoreEpCollapse,
        Suite::SixPart,
        Suite::Ass,
        Suite::FiveWayMp,
        Suite::FiveWayCore,
        Suite::CommuteLemma,
        Suite::Ew2,
        Suite::Adf,
        Suite::OrdersKep,
        Suite::CceConditional,
        Suite::EpCriteria,
        Suite::PenroseDrazin,
        Suite::ClosedForms,
        Suite::Oracle,
        Suite::Systems,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CoreEpEquiv => "core_ep_equiv",
            Suite::CoreEpCollapse => "core_ep_collapse",
            Suite::SixPart => "six_part",
            Suite::Ass => "ass",
            Suite::FiveWayMp => "five_way_mp",
            Suite::FiveWayCore => "five_way_core",
            Suite::CommuteLemma => "commute_lemma",
            Suite::Ew2 => "ew2",
            Suite::Adf => "adf",
            Suite::OrdersKep => "orders_kep",
            Suite::CceConditional => "cce_conditional",
            Suite::EpCriteria => "ep_criteria",
            Suite::PenroseDrazin => "penrose_drazin",
            Suite::ClosedForms => "closed_forms",
            Suite::Oracle => "oracle",
            Suite::Systems => "systems",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| GenInvError::UnknownSuite(s.to_string()))
    }
}

pub fn run_suite(suite: &str, spec: &EnsembleSpec, tol: &Tolerance) -> Result<VerificationReport> {
    let s = Suite::parse(suite)?;
    spec.validate()?;
    tol.validate()?;
    let results: Vec<Result<Vec<Outcome>>> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let a = gen_at(spec, i)?;
            let aux = sample_seed(spec.seed ^ 0x5eed_a0c5_0000_0000, i);
            Ok(check_sample(s, &a, aux, tol).unwrap_or_else(|e| vec![Outcome::new("evaluation", false, 0.0, e.to_string())]))
        })
        .collect();
    let mut outcomes = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        outcomes.extend(r?.into_iter().map(|o| (i, o)));
    }
    let name = format!("{} [{} n={} seed={}]", s.name(), spec.class, spec.size, spec.seed);
    let mut report = VerificationReport::from_outcomes(name, spec.count, outcomes);
    report.suite = s.name().to_string();
    Ok(report)
}

/// One suite over several ensembles, merged into a single report.
pub fn run_suite_on(suite: &str, specs: &[EnsembleSpec], tol: &Tolerance) -> Result<VerificationReport> {
    let s = Suite::parse(suite)?;
    let parts = specs.iter().map(|spec| run_suite(suite, spec, tol)).collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::merge(s.name(), parts))
}

/// Evaluates every statement of `suite` on one matrix. `aux_seed` feeds any
/// extra randomness the statements need.
pub fn check_sample(suite: Suite, a: &CMatrix, aux_seed: u64, tol: &Tolerance) -> Result<Vec<Outcome>> {
    match suite {
        Suite::CoreEpEquiv => core_ep_equiv(a, tol),
        Suite::CoreEpCollapse => core_ep_collapse(a, tol),
        Suite::SixPart => six_part(a, tol),
        Suite::Ass => ass(a, tol),
        Suite::FiveWayMp => five_way_mp(a, tol),
        Suite::FiveWayCore => five_way_core(a, tol),
        Suite::CommuteLemma => commute_lemma(a, tol),
        Suite::Ew2 => ew2(a, tol),
        Suite::Adf => adf(a, aux_seed, tol),
        Suite::OrdersKep => orders_kep(a, aux_seed, tol),
        Suite::CceConditional => cce_conditional(a, tol),
        Suite::EpCriteria => ep_criteria(a, tol),
        Suite::PenroseDrazin => penrose_drazin(a, tol),
        Suite::ClosedForms => closed_forms(a, tol),
        Suite::Oracle => oracle(a, tol),
        Suite::Systems => systems(a, aux_seed, tol),
    }
}

fn norms(ms: &[&CMatrix]) -> f64 {
    ms.iter().map(|m| m.frobenius_norm()).product()
}

fn holds(name: &str, c: Check) -> Outcome {
    Outcome::new(
        name,
        c.holds,
        c.residual,
        format!("residual {:e} exceeds bound {:e}", c.residual, c.bound),
    )
}

/// `left ⟺ right` on one sample.
fn iff(name: &str, left: Check, right: Check) -> Outcome {
    let residual = [left, right]
        .iter()
        .filter(|c| c.holds)
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    Outcome::new(
        name,
        left.holds == right.holds,
        residual,
        format!(
            "left side {} (residual {:e}, bound {:e}) but right side {} (residual {:e}, bound {:e})",
            left.holds, left.residual, left.bound, right.holds, right.residual, right.bound
        ),
    )
}

fn agreement(name: &str, c: &Criterion) -> Outcome {
    let residual = if c.direct.holds { c.direct.residual } else { 0.0 };
    Outcome::new(name, c.agrees(), residual, c.warnings.join("; "))
}

fn skip_all(names: &[&str]) -> Vec<Outcome> {
    names.iter().map(|n| Outcome::skip(*n)).collect()
}

fn core_ep_equiv(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let r = core_ep_equiv_report(a, tol)?;
    let def = r.core_ep_conditions[0].check;
    let mut out: Vec<Outcome> = r.core_ep_conditions[1..]
        .iter()
        .map(|c| iff(c.label, def, c.check))
        .collect();
    match &r.block_conditions {
        Some(b) => out.push(Outcome::new(
            "block conditions (a)(b)(c)",
            b.all() == def.holds,
            0.0,
            format!("block conditions {} but core-EP {}", b.all(), def.holds),
        )),
        None => out.push(Outcome::skip("block conditions (a)(b)(c)")),
    }
    Ok(out)
}

fn core_ep_collapse(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    const NAMES: [&str; 6] = [
        "DMP = Drazin",
        "MPD = Drazin",
        "CMP = Drazin",
        "DMP = MPD",
        "DMP = Drazin iff MPD = Drazin",
        "MPDMP = DMP iff MPDMP = MPD",
    ];
    if !is_core_ep(a, tol)?.holds {
        return Ok(skip_all(&NAMES));
    }
    let r = InverseReport::compute(a, tol)?;
    let na = a.frobenius_norm();
    let s1 = norms(&[&r.drazin, &r.mp]) * na;
    let s2 = norms(&[&r.mp, &r.mp, &r.core]);
    let dmp_d = Check::eq_scaled(&r.dmp, &r.drazin, s1, tol)?;
    let mpd_d = Check::eq_scaled(&r.mpd, &r.drazin, s1, tol)?;
    let sm = norms(&[&r.mp, &r.drazin, &r.mp]);
    Ok(vec![
        holds(NAMES[0], dmp_d),
        holds(NAMES[1], mpd_d),
        holds(NAMES[2], Check::eq_scaled(&r.cmp, &r.drazin, s2, tol)?),
        holds(NAMES[3], Check::eq_scaled(&r.dmp, &r.mpd, s1, tol)?),
        iff(NAMES[4], dmp_d, mpd_d),
        iff(
            NAMES[5],
            Check::eq_scaled(&r.mpdmp, &r.dmp, sm + s1, tol)?,
            Check::eq_scaled(&r.mpdmp, &r.mpd, sm + s1, tol)?,
        ),
    ])
}

fn six_part(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    const NAMES: [&str; 9] = [
        "(i) A^{+,d}A = AA^{+,d}",
        "(ii) A^{+,d}A^d = A^dA^{+,d}",
        "(iii) A^{+,d}A_c = A_cA^{+,d}",
        "(iv) A^{+,d,+}A^{+,d} = A^{+,d}A^{+,d,+}",
        "(v) A_c = A^{c,+}A^2",
        "(v) A_c = A^{+,d}A^2",
        "(v) A_c = A^{d,+}A^2",
        "(vi) Q_AA_c = A_c",
        "(vi) A_cQ_A = A_c",
    ];
    if !is_core_ep(a, tol)?.holds {
        return Ok(skip_all(&NAMES));
    }
    let r = InverseReport::compute(a, tol)?;
    let m = &r.mpd;
    let a2 = a * a;
    let qa = &r.mp * a;
    let comm = |x: &CMatrix, y: &CMatrix| Check::eq_scaled(&(x * y), &(y * x), 2.0 * norms(&[x, y]), tol);
    let c = &r.core;
    Ok(vec![
        holds(NAMES[0], comm(m, a)?),
        holds(NAMES[1], comm(m, &r.drazin)?),
        holds(NAMES[2], comm(m, c)?),
        holds(NAMES[3], comm(&r.mpdmp, m)?),
        holds(NAMES[4], Check::eq_scaled(c, &(&r.cmp * &a2), norms(&[&r.cmp, &a2]), tol)?),
        holds(NAMES[5], Check::eq_scaled(c, &(m * &a2), norms(&[m, &a2]), tol)?),
        holds(NAMES[6], Check::eq_scaled(c, &(&r.dmp * &a2), norms(&[&r.dmp, &a2]), tol)?),
        holds(NAMES[7], Check::eq_scaled(&(&qa * c), c, norms(&[&qa, c]), tol)?),
        holds(NAMES[8], Check::eq_scaled(&(c * &qa), c, norms(&[&qa, c]), tol)?),
    ])
}

struct Powers {
    r: InverseReport,
    ak: CMatrix,
    ak1: CMatrix,
}

fn powers(a: &CMatrix, tol: &Tolerance) -> Result<Powers> {
    let r = InverseReport::compute(a, tol)?;
    let ak = a.pow(r.index)?;
    let ak1 = &ak * a;
    Ok(Powers { r, ak, ak1 })
}

fn power_idempotent(p: &Powers, tol: &Tolerance) -> Result<Check> {
    Check::eq(&p.ak1, &p.ak, tol)
}

fn ass(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let p = powers(a, tol)?;
    let r = &p.r;
    let prod = &r.mpd * &r.dmp;
    let left = Check::eq_scaled(&r.cmp, &prod, norms(&[&r.mpd, &r.dmp]), tol)?;
    Ok(vec![iff("A^{c,+} = A^{+,d}A^{d,+} iff A^{k+1} = A^k", left, power_idempotent(&p, tol)?)])
}

/// `X·Y = Y` style identity with the factor norms as scale.
fn absorbs_left(x: &CMatrix, y: &CMatrix, tol: &Tolerance) -> Result<Check> {
    Check::eq_scaled(&(x * y), y, norms(&[x, y]), tol)
}

fn absorbs_right(y: &CMatrix, x: &CMatrix, tol: &Tolerance) -> Result<Check> {
    Check::eq_scaled(&(y * x), y, norms(&[x, y]), tol)
}

fn five_way_mp(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let p = powers(a, tol)?;
    let r = &p.r;
    let ak = &p.ak;
    let astar = a.conj_transpose();
    let mps = r.mp.conj_transpose();
    let eq = |lhs: &CMatrix, x: &CMatrix, y: &CMatrix| Check::eq_scaled(lhs, &(x * y), norms(&[x, y]), tol);
    let mut out = Vec::new();
    if r.rank > 0 {
        let h = hs_decompose(a, tol)?;
        out.push(agreement("(i) simplified: (SQ)^d EP and QSP = 0", &dmp_pinv_commute_criterion(&h, tol)?));
        out.push(agreement(
            "(i) unsimplified: (SQ)^d EP and (SQ)^d SP = 0",
            &dmp_pinv_commute_criterion_unsimplified(&h, tol)?,
        ));
    } else {
        out.push(Outcome::skip("(i) simplified: (SQ)^d EP and QSP = 0"));
        out.push(Outcome::skip("(i) unsimplified: (SQ)^d EP and (SQ)^d SP = 0"));
    }
    out.push(iff("(ii) A^{c,+} = A^{+,d}A iff A^kA^+ = A^k", eq(&r.cmp, &r.mpd, a)?, absorbs_right(ak, &r.mp, tol)?));
    out.push(iff("(iii) A^{c,+} = AA^{d,+} iff A^+A^k = A^k", eq(&r.cmp, a, &r.dmp)?, absorbs_left(&r.mp, ak, tol)?));
    out.push(iff(
        "(iv) A^{c,+} = A^{+,d}A* iff A^k(A^+)* = A^k",
        eq(&r.cmp, &r.mpd, &astar)?,
        absorbs_right(ak, &mps, tol)?,
    ));
    out.push(iff(
        "(v) A^{c,+} = A*A^{d,+} iff (A^+)*A^k = A^k",
        eq(&r.cmp, &astar, &r.dmp)?,
        absorbs_left(&mps, ak, tol)?,
    ));
    Ok(out)
}

fn five_way_core(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let p = powers(a, tol)?;
    let r = &p.r;
    let ak = &p.ak;
    let c = &r.core;
    let n = a.rows();
    let id = CMatrix::identity(n);
    let comm = |x: &CMatrix| Check::eq_scaled(&(x * c), &(c * x), 2.0 * norms(&[x, c]), tol);
    let fixed = |x: &CMatrix| absorbs_left(x, c, tol);
    let kernel = ak * &(&id - &(a * &r.mp));
    let range = &(&id - &(&r.mp * a)) * ak;
    let ak_scale = ak.frobenius_norm();
    Ok(vec![
        iff("(i) A^{d,+}A_c = A_cA^{d,+} iff N(A*) in N(A^k)", comm(&r.dmp)?, Check::zero(&kernel, ak_scale, tol)),
        iff("(ii) A^{+,d}A_c = A_cA^{+,d} iff R(A^k) in R(A*)", comm(&r.mpd)?, Check::zero(&range, ak_scale, tol)),
        iff("(iii) A_c = A^{d,+}A_c iff A^k = A^{k+1}", fixed(&r.dmp)?, power_idempotent(&p, tol)?),
        iff("(iv) A_c = A^{+,d}A_c iff A^+A^k = A^k", fixed(&r.mpd)?, absorbs_left(&r.mp, ak, tol)?),
        iff("(v) A_c = A^{c,+}A_c iff A^+A^k = A^k", fixed(&r.cmp)?, absorbs_left(&r.mp, ak, tol)?),
    ])
}

fn commute_lemma(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let r = InverseReport::compute(a, tol)?;
    let d = &r.drazin;
    let d2 = d * d;
    let left = d * &r.mpd;
    let right = &r.dmp * d;
    Ok(vec![
        holds(
            "A^dA^{+,d} = A^{d,+}A^d",
            Check::eq_scaled(&left, &right, norms(&[d, &r.mpd]) + norms(&[d, &r.dmp]), tol)?,
        ),
        holds("A^dA^{+,d} = (A^d)^2", Check::eq_scaled(&left, &d2, norms(&[d, &r.mpd]), tol)?),
        holds("A^{d,+}A^d = (A^d)^2", Check::eq_scaled(&right, &d2, norms(&[d, &r.dmp]), tol)?),
    ])
}

fn ew2(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    Ok(core_upper_bound_check(a, tol)?
        .into_iter()
        .map(|o| {
            Outcome::new(
                format!("A <= A_c ({})", o.kind.name()),
                o.holds,
                o.left_residual.max(o.right_residual),
                format!("residuals {:e}, {:e}", o.left_residual, o.right_residual),
            )
        })
        .collect())
}

fn partner(a: &CMatrix, seed: u64) -> CMatrix {
    let mut rng = sample_rng(seed, 0);
    gaussian(a.rows(), a.cols(), &mut rng)
}

fn adf(a: &CMatrix, seed: u64, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let b = partner(a, seed);
    let r = InverseReport::compute(a, tol)?;
    let agree = |name: &str, t: (bool, bool, bool), agree: bool| {
        Outcome::new(name, agree, 0.0, format!("characterizations {t:?}"))
    };
    let all_true = |name: &str, t: (bool, bool, bool)| Outcome::new(name, t == (true, true, true), 0.0, format!("characterizations {t:?}"));
    let d_rand = dmp_order_characterizations(a, &b, tol)?;
    let m_rand = mpd_order_characterizations(a, &b, tol)?;
    let d_core = dmp_order_characterizations(a, &r.core, tol)?;
    let m_core = mpd_order_characterizations(a, &r.core, tol)?;
    let bd = upper_bound_from(a, &r.dmp, &b, tol)?;
    let bm = upper_bound_from(a, &r.mpd, &b, tol)?;
    let d_built = dmp_order_characterizations(a, &bd, tol)?;
    let m_built = mpd_order_characterizations(a, &bm, tol)?;
    Ok(vec![
        agree("DMP characterizations agree (random B)", d_rand.as_tuple(), d_rand.agree()),
        agree("MPD characterizations agree (random B)", m_rand.as_tuple(), m_rand.agree()),
        all_true("DMP characterizations hold (B = A_c)", d_core.as_tuple()),
        all_true("MPD characterizations hold (B = A_c)", m_core.as_tuple()),
        all_true("DMP characterizations hold (constructed B)", d_built.as_tuple()),
        all_true("MPD characterizations hold (constructed B)", m_built.as_tuple()),
    ])
}

fn orders_kep(a: &CMatrix, seed: u64, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let r = InverseReport::compute(a, tol)?;
    let kep = is_k_ep(a, tol)?;
    let s = norms(&[&r.mp, &r.core, &r.mp]) + norms(&[&r.drazin, a, &r.mp]);
    let collapsed = [
        Check::eq_scaled(&r.cmp, &r.dmp, s, tol)?,
        Check::eq_scaled(&r.dmp, &r.mpd, s, tol)?,
        Check::eq_scaled(&r.mpd, &r.drazin, s, tol)?,
    ];
    let all = collapsed.iter().all(|c| c.holds);
    let worst = collapsed.iter().map(|c| c.residual).fold(0.0, f64::max);
    let mut out = vec![Outcome::new(
        "k-EP iff A^{c,+} = A^{d,+} = A^{+,d} = A^d",
        kep.holds == all,
        if all { worst } else { 0.0 },
        format!("k-EP {} (residual {:e}) but collapse {all} (worst {worst:e})", kep.holds, kep.residual),
    )];
    const NAMES: [&str; 2] = ["relations agree (random B)", "relations agree (B = A_c)"];
    if !kep.holds {
        out.extend(skip_all(&NAMES));
        return Ok(out);
    }
    let b = partner(a, seed);
    for (name, target) in NAMES.iter().zip([&b, &r.core]) {
        let h: Vec<bool> = leq_all(a, target, tol)?.iter().map(|o| o.holds).collect();
        out.push(Outcome::new(*name, h.iter().all(|x| *x == h[0]), 0.0, format!("relations {h:?}")));
    }
    Ok(out)
}

fn cce_conditional(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    const NAME: &str = "A^{c,+} EP iff A^{C,#}(A^{c,+})^+ = (A^{c,+})^+A^{C,#}";
    let r = InverseReport::compute(a, tol)?;
    if r.rank == 0 {
        return Ok(vec![Outcome::skip(NAME)]);
    }
    let h = hs_decompose(a, tol)?;
    let d = hs_derived(&h, tol)?;
    if !Check::eq(&d.core_core_ep, &d.core_drazin, tol)?.holds {
        return Ok(vec![Outcome::skip(NAME)]);
    }
    let cp = pinv_product(&r.cmp, &[&r.mp, &r.core, &r.mp], tol)?;
    let comm = Check::eq_scaled(&(&r.cce * &cp), &(&cp * &r.cce), 2.0 * norms(&[&r.cce, &cp]), tol)?;
    Ok(vec![iff(NAME, ep_check_product(&r.cmp, &[&r.mp, &r.core, &r.mp], tol)?, comm)])
}

fn ep_criteria(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    const NAMES: [&str; 6] = [
        "CMP EP criterion",
        "MPDMP EP criterion",
        "CCE EP criterion",
        "CMP EP commutation criterion",
        "DMP pseudoinverse commutation (simplified)",
        "DMP pseudoinverse commutation (unsimplified)",
    ];
    if crate::factor::numerical_rank(a, tol)? == 0 {
        return Ok(skip_all(&NAMES));
    }
    let h = hs_decompose(a, tol)?;
    let mpdmp = mpdmp_ep_criterion(&h, tol)?;
    let cce = cce_ep_criterion(&h, tol)?;
    let mut out = vec![
        agreement(NAMES[0], &cmp_ep_criterion(&h, tol)?),
        agreement(NAMES[1], &mpdmp),
        agreement(NAMES[2], &cce),
        agreement(NAMES[3], &wqrt_criterion(a, tol)?),
        agreement(NAMES[4], &dmp_pinv_commute_criterion(&h, tol)?),
        agreement(NAMES[5], &dmp_pinv_commute_criterion_unsimplified(&h, tol)?),
    ];
    if mpdmp.holds {
        let d = hs_derived(&h, tol)?;
        let pp = &h.p * &h.p.conj_transpose();
        let qq = &h.q * &h.q.conj_transpose();
        let st = &d.sigma_tilde;
        let m = &d.delta_hat;
        let cd = &d.core_drazin;
        let rhs = &(&(&h.q * &pinv_product(st, &[&h.q, cd, cd, cd], tol)?) * st) * &h.q.conj_transpose();
        let mn = m.frobenius_norm();
        out.push(holds("MPDMP EP consequence [PP*, D^] = 0", Check::zero(&pp.commutator(m)?, mn, tol)));
        out.push(holds("MPDMP EP consequence [QQ*, D^] = 0", Check::zero(&qq.commutator(m)?, mn, tol)));
        out.push(holds("MPDMP EP consequence D^ = QS~^+S~Q*", Check::eq(m, &rhs, tol)?));
    }
    for c in &cce.consequences {
        out.push(holds(&format!("CCE EP consequence {}", c.label), c.check));
    }
    Ok(out)
}

fn bounded(name: &str, residual: f64, bound: f64) -> Outcome {
    Outcome::new(name, residual <= bound, residual, format!("residual {residual:e} exceeds {bound:e}"))
}

fn penrose_drazin(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let x = pinv(a, tol)?;
    let scale = PROPERTY_TOL * (1.0 + a.frobenius_norm()).powi(3);
    let ax = a * &x;
    let xa = &x * a;
    let mut out = vec![
        bounded("AXA = A", (&(&ax * a) - a).frobenius_norm(), scale),
        bounded("XAX = X", (&(&xa * &x) - &x).frobenius_norm(), scale),
        bounded("(AX)* = AX", (&ax.conj_transpose() - &ax).frobenius_norm(), scale),
        bounded("(XA)* = XA", (&xa.conj_transpose() - &xa).frobenius_norm(), scale),
    ];
    if a.is_square() {
        let k = index(a, tol)?;
        let d = drazin(a, tol)?;
        let ak = a.pow(k)?;
        out.push(bounded("A^{k+1}A^d = A^k", (&(&(&ak * a) * &d) - &ak).frobenius_norm(), scale));
        out.push(bounded("A^dAA^d = A^d", (&(&(&d * a) * &d) - &d).frobenius_norm(), scale));
        out.push(bounded("AA^d = A^dA", a.commutator(&d)?.frobenius_norm(), scale));
    }
    Ok(out)
}

fn relative(x: &CMatrix, y: &CMatrix) -> f64 {
    (x - y).frobenius_norm() / (1.0 + x.frobenius_norm() + y.frobenius_norm())
}

fn closed(name: &str, x: &CMatrix, y: &CMatrix) -> Outcome {
    bounded(name, relative(x, y), CLOSED_FORM_TOL)
}

fn closed_forms(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let r = InverseReport::compute(a, tol)?;
    let (g_dmp, g_mpd) = greville_forms(a, tol)?;
    let mut out = vec![closed("Greville form of DMP", &g_dmp, &r.dmp), closed("Greville form of MPD", &g_mpd, &r.mpd)];
    if r.rank == 0 {
        out.push(Outcome::skip("closed form of (A^{+,d,+})^+"));
        return Ok(out);
    }
    let dual = mpdmp_pinv_dual(a, tol)?;
    out.push(closed("closed form of (A^{+,d,+})^+", &dual.direct, &dual.closed_form));
    let h = hs_decompose(a, tol)?;
    let d = hs_derived(&h, tol)?;
    let b = block_forms(&h, &d)?;
    for (name, x, y) in [
        ("block form of A^+", &b.mp, &r.mp),
        ("block form of A^d", &b.drazin, &r.drazin),
        ("block form of A_c", &b.core, &r.core),
        ("block form of DMP", &b.dmp, &r.dmp),
        ("block form of MPD", &b.mpd, &r.mpd),
        ("block form of MPDMP", &b.mpdmp, &r.mpdmp),
    ] {
        out.push(closed(name, x, y));
    }
    Ok(out)
}

fn is_integral(a: &CMatrix) -> bool {
    a.data()
        .iter()
        .all(|z| z.re.fract() == 0.0 && z.im.fract() == 0.0 && z.re.abs() <= 1e6 && z.im.abs() <= 1e6)
}

fn oracle(a: &CMatrix, tol: &Tolerance) -> Result<Vec<Outcome>> {
    const NAMES: [&str; 7] = ["index", "mp", "drazin", "dmp", "mpd", "cmp", "mpdmp"];
    if !is_integral(a) || a.rows() > 8 {
        return Ok(skip_all(&NAMES));
    }
    let exact = ExactInverses::compute(&RMatrix::from_cmatrix(a)?)?;
    let r = InverseReport::compute(a, tol)?;
    let mut out = vec![Outcome::new(
        "index",
        exact.index == r.index,
        0.0,
        format!("exact index {} but computed {}", exact.index, r.index),
    )];
    for (name, e) in exact.named() {
        let x = r.get(name).ok_or_else(|| GenInvError::InvalidSpec(name.into()))?;
        let err = (x - &e.to_cmatrix()).max_abs();
        out.push(bounded(name, err, ORACLE_TOL));
    }
    Ok(out)
}

fn systems(a: &CMatrix, seed: u64, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let core_ep = is_core_ep(a, tol)?.holds;
    let mut out = Vec::new();
    for s in System::ALL {
        if s == System::Kj43 && !core_ep {
            out.push(Outcome::skip("kj43"));
            continue;
        }
        out.extend(system_outcomes_for(a, s, seed, tol)?);
    }
    Ok(out)
}
