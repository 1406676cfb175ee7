//! Systems of matrix equations with a unique solution, checked by
//! substituting the designated solution and then refuting random
//! perturbations of it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ensemble::gaussian;
use super::{Outcome, VerificationReport};
use crate::classify::is_core_ep;
use crate::error::{GenInvError, Result};
use crate::factor::{pinv_scaled, spectral_norm};
use crate::geninv::InverseReport;
use crate::numkernel::{CMatrix, Check, Tolerance};

/// Largest relative residual accepted for the designated solution.
pub const SOLUTION_TOL: f64 = 1e-9;
/// Smallest equation violation that counts as refuting a perturbation.
pub const BREAK_TOL: f64 = 1e-4;
pub const PERTURBATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    /// `XP_A = X`, `XA = A^d`; solution `A^dA†`.
    A2,
    /// `Q_AX = X`, `AX = A^d`; solution `A†A^d`.
    A2Dual,
    /// `XA³X = X`, `AX = A^dA†`, `XA = A†A^d`; solution `A†A^dA†`.
    A1,
    RemarkI,
    RemarkII,
    RemarkIII,
    RemarkIV,
    RemarkV,
    /// `A^kX = A^{k+1}`, `AX = XA`, `XA^dX = X`; solution `A_c`.
    A101,
    /// `A³X = AA^d`, `R(X) ⊆ R(A^k)` for core-EP `A`; solution `A†A^dA†`.
    Kj43,
}

impl System {
    pub const ALL: [System; 10] = [
        System::A2,
        System::A2Dual,
        System::A1,
        System::RemarkI,
        System::RemarkII,
        System::RemarkIII,
        System::RemarkIV,
        System::RemarkV,
        System::A101,
        System::Kj43,
    ];

    pub fn name(self) -> &'static str {
        match self {
            System::A2 => "a2",
            System::A2Dual => "a2_dual",
            System::A1 => "a1",
            System::RemarkI => "remark_i",
            System::RemarkII => "remark_ii",
            System::RemarkIII => "remark_iii",
            System::RemarkIV => "remark_iv",
            System::RemarkV => "remark_v",
            System::A101 => "a101",
            System::Kj43 => "kj43",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| GenInvError::UnknownSystem(s.to_string()))
    }
}

#[derive(Clone)]
struct Ctx {
    a: CMatrix,
    inv: InverseReport,
    /// `P_A = AA†`
    pa: CMatrix,
    /// `Q_A = A†A`
    qa: CMatrix,
    ak: CMatrix,
    /// `A^k (A^k)†`, the orthogonal projector onto `R(A^k)`.
    range_k: CMatrix,
}

impl Ctx {
    fn new(a: &CMatrix, tol: &Tolerance) -> Result<Self> {
        let inv = InverseReport::compute(a, tol)?;
        let ak = a.pow(inv.index)?;
        let reference = spectral_norm(a)?.powi(inv.index as i32);
        let range_k = &ak * &pinv_scaled(&ak, reference, tol)?;
        Ok(Self {
            pa: a * &inv.mp,
            qa: &inv.mp * a,
            a: a.clone(),
            inv,
            ak,
            range_k,
        })
    }

    fn solution(&self, s: System) -> CMatrix {
        let r = &self.inv;
        match s {
            System::A2 => &r.drazin * &r.mp,
            System::A2Dual => &r.mp * &r.drazin,
            System::A101 => r.core.clone(),
            _ => r.mpdmp.clone(),
        }
    }

    /// Projection of `e` onto the directions allowed by the structural
    /// equation of the system, if it has one.
    fn admissible(&self, s: System, e: &CMatrix) -> CMatrix {
        match s {
            System::A2 | System::RemarkIV => e * &self.pa,
            System::A2Dual | System::RemarkV => &self.qa * e,
            System::A1 | System::RemarkI | System::RemarkII | System::RemarkIII => &(&self.qa * e) * &self.pa,
            System::Kj43 => &self.range_k * e,
            System::A101 => e.clone(),
        }
    }
}

struct Residual {
    name: &'static str,
    diff: CMatrix,
    scale: f64,
}

impl Residual {
    fn absolute(&self) -> f64 {
        self.diff.frobenius_norm()
    }

    fn relative(&self) -> f64 {
        self.absolute() / (1.0 + self.scale)
    }
}

fn n(m: &CMatrix) -> f64 {
    m.frobenius_norm()
}

fn equations(c: &Ctx, s: System, x: &CMatrix) -> Vec<Residual> {
    let a = &c.a;
    let r = &c.inv;
    let eq = |name, lhs: CMatrix, rhs: &CMatrix, scale: f64| Residual {
        name,
        diff: &lhs - rhs,
        scale,
    };
    let nx = n(x);
    let na = n(a);
    let dm = &r.drazin * &r.mp;
    let md = &r.mp * &r.drazin;
    let x_pa = || eq("XP_A = X", x * &c.pa, x, nx);
    let qa_x = || eq("Q_AX = X", &c.qa * x, x, nx);
    let qa_x_pa = || eq("Q_AXP_A = X", &(&c.qa * x) * &c.pa, x, nx);
    let ax_dm = || eq("AX = A^dA^+", a * x, &dm, na * nx + n(&dm));
    let xa_md = || eq("XA = A^+A^d", x * a, &md, na * nx + n(&md));
    match s {
        System::A2 => vec![x_pa(), eq("XA = A^d", x * a, &r.drazin, na * nx + n(&r.drazin))],
        System::A2Dual => vec![qa_x(), eq("AX = A^d", a * x, &r.drazin, na * nx + n(&r.drazin))],
        System::A1 => {
            let a3 = &(a * a) * a;
            vec![
                eq("XA^3X = X", &(x * &a3) * x, x, nx * nx * n(&a3) + nx),
                ax_dm(),
                xa_md(),
            ]
        }
        System::RemarkI => vec![qa_x_pa(), ax_dm()],
        System::RemarkII => vec![
            qa_x_pa(),
            eq("AXA = A^d", &(a * x) * a, &r.drazin, na * na * nx + n(&r.drazin)),
        ],
        System::RemarkIII => vec![qa_x_pa(), xa_md()],
        System::RemarkIV => vec![x_pa(), xa_md()],
        System::RemarkV => vec![qa_x(), ax_dm()],
        System::A101 => {
            let ak1 = &c.ak * a;
            vec![
                eq("A^kX = A^{k+1}", &c.ak * x, &ak1, n(&c.ak) * nx + n(&ak1)),
                eq("AX = XA", a * x, &(x * a), 2.0 * na * nx),
                eq("XA^dX = X", &(x * &r.drazin) * x, x, nx * nx * n(&r.drazin) + nx),
            ]
        }
        System::Kj43 => {
            let a3 = &(a * a) * a;
            let spectral = a * &r.drazin;
            vec![
                eq("A^3X = AA^d", &a3 * x, &spectral, n(&a3) * nx + n(&spectral)),
                eq("R(X) in R(A^k)", &c.range_k * x, x, nx),
            ]
        }
    }
}

/// Residuals of `system` at its designated solution, plus refutation of
/// [`PERTURBATIONS`] random admissible perturbations drawn from `seed`.
pub fn verify_system_seeded(a: &CMatrix, system: System, seed: u64, tol: &Tolerance) -> Result<VerificationReport> {
    a.ensure_square()?;
    if system == System::Kj43 && !is_core_ep(a, tol)?.holds {
        return Err(GenInvError::PreconditionViolated(
            "system kj43 requires a core-EP matrix".into(),
        ));
    }
    Ok(VerificationReport::from_outcomes(
        format!("system:{}", system.name()),
        1,
        system_outcomes_for(a, system, seed, tol)?.into_iter().map(|o| (0, o)).collect(),
    ))
}

pub fn verify_system(a: &CMatrix, system: System, tol: &Tolerance) -> Result<VerificationReport> {
    verify_system_seeded(a, system, 0, tol)
}

/// Outcomes of one system on one matrix, for use inside suites.
///
/// Perturbations are applied to `A/‖A‖₂`: uniqueness does not depend on the
/// scale of `A`, but the size of the violation does.
pub(crate) fn system_outcomes_for(a: &CMatrix, system: System, seed: u64, tol: &Tolerance) -> Result<Vec<Outcome>> {
    let c = Ctx::new(a, tol)?;
    let norm = spectral_norm(a)?;
    let unit = if norm > 0.0 { Ctx::new(&a.scale_real(1.0 / norm), tol)? } else { c.clone() };
    let mut out = solution_outcomes(&c, system);
    out.push(uniqueness_outcome(&unit, system, seed));
    Ok(out)
}

fn solution_outcomes(c: &Ctx, system: System) -> Vec<Outcome> {
    let x = c.solution(system);
    equations(c, system, &x)
        .into_iter()
        .map(|e| {
            let rel = e.relative();
            Outcome::new(
                format!("{}: {}", system.name(), e.name),
                rel <= SOLUTION_TOL,
                rel,
                format!("relative residual {rel:e}"),
            )
        })
        .collect()
}

fn uniqueness_outcome(c: &Ctx, system: System, seed: u64) -> Outcome {
    let x = c.solution(system);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 0.1 * (1.0 + n(&x));
    let dim = c.a.rows();
    let mut weakest = f64::INFINITY;
    let mut degenerate = 0;
    for _ in 0..PERTURBATIONS {
        let e = c.admissible(system, &gaussian(dim, dim, &mut rng));
        let en = n(&e);
        if en < 1e-12 {
            degenerate += 1;
            continue;
        }
        let y = &x + &e.scale_real(size / en);
        let worst = equations(c, system, &y)
            .iter()
            .map(Residual::absolute)
            .fold(0.0, f64::max);
        weakest = weakest.min(worst);
    }
    let theorem = format!("{}: uniqueness", system.name());
    if degenerate == PERTURBATIONS {
        Outcome::new(theorem, true, 0.0, "no admissible direction")
    } else {
        Outcome::new(
            theorem,
            weakest > BREAK_TOL,
            0.0,
            format!("weakest perturbation violates the system by {weakest:e}"),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `X = A^{†,d} + F(I − AA†)`, solving `XA = A†A_c`.
    Q1,
    /// `X = A^{d,†} + (I − A†A)F`, solving `A_cA† = AX`.
    Q2,
}

/// The member of a general solution determined by `f`, checked against the
/// equation it solves.
pub fn solution_family(a: &CMatrix, f: &CMatrix, which: Family, tol: &Tolerance) -> Result<CMatrix> {
    let dim = a.ensure_square()?;
    if f.shape() != a.shape() {
        return Err(GenInvError::DimensionMismatch {
            op: "solution_family",
            left: a.shape(),
            right: f.shape(),
        });
    }
    let r = InverseReport::compute(a, tol)?;
    let id = CMatrix::identity(dim);
    let (x, check, what) = match which {
        Family::Q1 => {
            let x = &r.mpd + &(f * &(&id - &(a * &r.mp)));
            let rhs = &r.mp * &r.core;
            let scale = n(&x) * n(a) + n(&r.mp) * n(&r.core);
            let c = Check::eq_scaled(&(&x * a), &rhs, scale, tol)?;
            (x, c, "XA = A^+A_c")
        }
        Family::Q2 => {
            let x = &r.dmp + &(&(&id - &(&r.mp * a)) * f);
            let lhs = &r.core * &r.mp;
            let scale = n(&x) * n(a) + n(&r.mp) * n(&r.core);
            let c = Check::eq_scaled(&lhs, &(a * &x), scale, tol)?;
            (x, c, "A_cA^+ = AX")
        }
    };
    if !check.holds {
        return Err(GenInvError::ResidualFailure {
            what: what.to_string(),
            residual: check.residual,
        });
    }
    Ok(x)
}
