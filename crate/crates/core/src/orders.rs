//! Binary relations `A ≤ B` induced by a generalized inverse `X` of `A`:
//! `XA = XB` and `AX = BX`.

use serde::{Deserialize, Serialize};

use crate::error::{GenInvError, Result};
use crate::geninv::InverseReport;
use crate::numkernel::{CMatrix, Check, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Drazin,
    Dmp,
    Mpd,
    Cmp,
}

impl OrderKind {
    pub const ALL: [OrderKind; 4] = [OrderKind::Drazin, OrderKind::Dmp, OrderKind::Mpd, OrderKind::Cmp];

    pub fn name(self) -> &'static str {
        match self {
            OrderKind::Drazin => "drazin",
            OrderKind::Dmp => "dmp",
            OrderKind::Mpd => "mpd",
            OrderKind::Cmp => "cmp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    fn inverse(self, r: &InverseReport) -> &CMatrix {
        match self {
            OrderKind::Drazin => &r.drazin,
            OrderKind::Dmp => &r.dmp,
            OrderKind::Mpd => &r.mpd,
            OrderKind::Cmp => &r.cmp,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub kind: OrderKind,
    pub holds: bool,
    /// `‖XA − XB‖_F`
    pub left_residual: f64,
    /// `‖AX − BX‖_F`
    pub right_residual: f64,
    pub left_bound: f64,
    pub right_bound: f64,
}

fn ensure_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    a.ensure_square()?;
    b.ensure_square()?;
    if a.shape() != b.shape() {
        return Err(GenInvError::DimensionMismatch {
            op: "order",
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

fn report(kind: OrderKind, a: &CMatrix, b: &CMatrix, x: &CMatrix, tol: &Tolerance) -> Result<OrderReport> {
    let scale = x.frobenius_norm() * (a.frobenius_norm() + b.frobenius_norm());
    let left = Check::eq_scaled(&(x * a), &(x * b), scale, tol)?;
    let right = Check::eq_scaled(&(a * x), &(b * x), scale, tol)?;
    Ok(OrderReport {
        kind,
        holds: left.holds && right.holds,
        left_residual: left.residual,
        right_residual: right.residual,
        left_bound: left.bound,
        right_bound: right.bound,
    })
}

pub fn leq(a: &CMatrix, b: &CMatrix, kind: OrderKind, tol: &Tolerance) -> Result<OrderReport> {
    ensure_pair(a, b)?;
    let r = InverseReport::compute(a, tol)?;
    report(kind, a, b, kind.inverse(&r), tol)
}

/// All four relations, sharing one computation of the inverses of `A`.
pub fn leq_all(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Vec<OrderReport>> {
    ensure_pair(a, b)?;
    let r = InverseReport::compute(a, tol)?;
    OrderKind::ALL
        .into_iter()
        .map(|k| report(k, a, b, k.inverse(&r), tol))
        .collect()
}

/// `A ≤ A_c` under each of the four relations.
pub fn core_upper_bound_check(a: &CMatrix, tol: &Tolerance) -> Result<Vec<OrderReport>> {
    a.ensure_square()?;
    let r = InverseReport::compute(a, tol)?;
    OrderKind::ALL
        .into_iter()
        .map(|k| report(k, a, &r.core, k.inverse(&r), tol))
        .collect()
}

/// Three equivalent forms of one relation, evaluated independently.
#[derive(Debug, Clone, Serialize)]
pub struct Characterizations {
    /// The defining pair of identities.
    pub definition: bool,
    /// The form stated through `A^d`.
    pub drazin_form: bool,
    /// The form stated through `A^k`.
    pub power_form: bool,
    pub checks: Vec<Check>,
}

impl Characterizations {
    pub fn as_tuple(&self) -> (bool, bool, bool) {
        (self.definition, self.drazin_form, self.power_form)
    }

    pub fn agree(&self) -> bool {
        self.definition == self.drazin_form && self.drazin_form == self.power_form
    }
}

struct Parts {
    r: InverseReport,
    ak: CMatrix,
}

fn parts(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Parts> {
    ensure_pair(a, b)?;
    let r = InverseReport::compute(a, tol)?;
    let ak = a.pow(r.index)?;
    Ok(Parts { r, ak })
}

fn norms(ms: &[&CMatrix]) -> f64 {
    ms.iter().map(|m| m.frobenius_norm()).product()
}

/// `Y = L₁ = L₂` as two residual checks, each scaled by its factor norms.
fn chain(
    y: &CMatrix,
    l1: (&CMatrix, f64),
    l2: (&CMatrix, f64),
    tol: &Tolerance,
) -> Result<(bool, Check, Check)> {
    let c1 = Check::eq_scaled(y, l1.0, l1.1, tol)?;
    let c2 = Check::eq_scaled(y, l2.0, l2.1, tol)?;
    Ok((c1.holds && c2.holds, c1, c2))
}

/// `A ≤^{d,†} B` as the definition, as `A^d = A^dA†B = B(A^d)²`, and as
/// `A^k = A^kA†B = BA^dA^k`.
pub fn dmp_order_characterizations(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Characterizations> {
    let Parts { r, ak } = parts(a, b, tol)?;
    let def = report(OrderKind::Dmp, a, b, &r.dmp, tol)?;
    let d = &r.drazin;
    let (drazin_form, c1, c2) = chain(
        d,
        (&(&(d * &r.mp) * b), norms(&[d, &r.mp, b])),
        (&(&(b * d) * d), norms(&[b, d, d])),
        tol,
    )?;
    let (power_form, c3, c4) = chain(
        &ak,
        (&(&(&ak * &r.mp) * b), norms(&[&ak, &r.mp, b])),
        (&(&(b * d) * &ak), norms(&[b, d, &ak])),
        tol,
    )?;
    Ok(Characterizations {
        definition: def.holds,
        drazin_form,
        power_form,
        checks: vec![c1, c2, c3, c4],
    })
}

/// `A ≤^{†,d} B` as the definition, as `A^d = (A^d)²B = BA†A^d`, and as
/// `A^k = A^kA^dB = BA†A^k`.
pub fn mpd_order_characterizations(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Characterizations> {
    let Parts { r, ak } = parts(a, b, tol)?;
    let def = report(OrderKind::Mpd, a, b, &r.mpd, tol)?;
    let d = &r.drazin;
    let (drazin_form, c1, c2) = chain(
        d,
        (&(&(d * d) * b), norms(&[d, d, b])),
        (&(&(b * &r.mp) * d), norms(&[b, &r.mp, d])),
        tol,
    )?;
    let (power_form, c3, c4) = chain(
        &ak,
        (&(&(&ak * d) * b), norms(&[&ak, d, b])),
        (&(&(b * &r.mp) * &ak), norms(&[b, &r.mp, &ak])),
        tol,
    )?;
    Ok(Characterizations {
        definition: def.holds,
        drazin_form,
        power_form,
        checks: vec![c1, c2, c3, c4],
    })
}

/// A matrix `B` with `A ≤ B` under the relation induced by `X`:
/// `B = A + (I − X†X) Y (I − XX†)`.
pub fn upper_bound_from(a: &CMatrix, x: &CMatrix, y: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    ensure_pair(a, y)?;
    let n = a.rows();
    let xp = crate::factor::pinv(x, tol)?;
    let id = CMatrix::identity(n);
    let left = &id - &(&xp * x);
    let right = &id - &(x * &xp);
    Ok(a + &(&(&left * y) * &right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::verify::ensemble::{gen, EnsembleClass, EnsembleSpec};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn holds(a: &CMatrix, b: &CMatrix, kind: OrderKind) -> bool {
        leq(a, b, kind, &tol()).unwrap().holds
    }

    #[test]
    fn example_pair() {
        let (a, b) = (fixtures::a3(), fixtures::b3());
        assert!(holds(&a, &b, OrderKind::Drazin));
        assert!(holds(&a, &b, OrderKind::Dmp));
        assert!(!holds(&a, &b, OrderKind::Mpd));
        assert!(!holds(&a, &b, OrderKind::Cmp));
        let all: Vec<bool> = leq_all(&a, &b, &tol()).unwrap().iter().map(|r| r.holds).collect();
        assert_eq!(all, vec![true, true, false, false]);
    }

    #[test]
    fn equal_inputs_are_related() {
        for a in [fixtures::a1(), fixtures::a2(), fixtures::a3()] {
            for k in OrderKind::ALL {
                assert!(holds(&a, &a, k));
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let err = leq(&fixtures::a1(), &CMatrix::identity(2), OrderKind::Dmp, &tol()).unwrap_err();
        assert!(matches!(err, GenInvError::DimensionMismatch { .. }));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in OrderKind::ALL {
            assert_eq!(OrderKind::parse(k.name()), Some(k));
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert_eq!(OrderKind::parse("star"), None);
    }

    #[test]
    fn core_part_is_an_upper_bound() {
        let t = tol();
        assert!(core_upper_bound_check(&fixtures::a1(), &t).unwrap().iter().all(|r| r.holds));
        let n = CMatrix::from_real_rows(&[[0.0, 1.0, 2.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]);
        assert!(core_upper_bound_check(&n, &t).unwrap().iter().all(|r| r.holds));
        let spec = EnsembleSpec::new(6, 40, 21, EnsembleClass::Generic).unwrap();
        for a in gen(&spec).unwrap() {
            assert!(core_upper_bound_check(&a, &t).unwrap().iter().all(|r| r.holds));
        }
    }

    #[test]
    fn characterizations_on_fixtures() {
        let t = tol();
        let c = dmp_order_characterizations(&fixtures::a3(), &fixtures::b3(), &t).unwrap();
        assert_eq!(c.as_tuple(), (true, true, true));
        let c = mpd_order_characterizations(&fixtures::a3(), &fixtures::b3(), &t).unwrap();
        assert_eq!(c.as_tuple(), (false, false, false));
        assert!(dmp_order_characterizations(&fixtures::a1(), &fixtures::a2(), &t).unwrap().agree());
        assert!(mpd_order_characterizations(&fixtures::a1(), &fixtures::a2(), &t).unwrap().agree());

        let a = fixtures::a1();
        let core = InverseReport::compute(&a, &t).unwrap().core;
        assert_eq!(dmp_order_characterizations(&a, &core, &t).unwrap().as_tuple(), (true, true, true));
        assert_eq!(mpd_order_characterizations(&a, &core, &t).unwrap().as_tuple(), (true, true, true));

        let ns = CMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 3.0]]);
        assert_eq!(mpd_order_characterizations(&ns, &ns, &t).unwrap().as_tuple(), (true, true, true));
    }

    #[test]
    fn constructed_upper_bounds() {
        let t = tol();
        let spec = EnsembleSpec::new(5, 20, 22, EnsembleClass::FixedIndex(2)).unwrap();
        let ys = gen(&EnsembleSpec::new(5, 20, 23, EnsembleClass::Generic).unwrap()).unwrap();
        for (a, y) in gen(&spec).unwrap().iter().zip(&ys) {
            let r = InverseReport::compute(a, &t).unwrap();
            let b = upper_bound_from(a, &r.dmp, y, &t).unwrap();
            let c = dmp_order_characterizations(a, &b, &t).unwrap();
            assert_eq!(c.as_tuple(), (true, true, true), "{:?}", c.checks);
            let b = upper_bound_from(a, &r.mpd, y, &t).unwrap();
            let c = mpd_order_characterizations(a, &b, &t).unwrap();
            assert_eq!(c.as_tuple(), (true, true, true), "{:?}", c.checks);
        }
    }

    #[test]
    fn k_ep_collapses_the_relations() {
        let t = tol();
        let a_s = gen(&EnsembleSpec::new(4, 20, 24, EnsembleClass::KEp).unwrap()).unwrap();
        let bs = gen(&EnsembleSpec::new(4, 20, 25, EnsembleClass::Generic).unwrap()).unwrap();
        for (a, b) in a_s.iter().zip(&bs) {
            let core = InverseReport::compute(a, &t).unwrap().core;
            for target in [b, &core, a] {
                let h: Vec<bool> = leq_all(a, target, &t).unwrap().iter().map(|r| r.holds).collect();
                assert!(h.iter().all(|x| *x == h[0]), "{h:?}");
            }
        }
    }
}
