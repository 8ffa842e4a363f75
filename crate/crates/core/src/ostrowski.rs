//! Left-hand side of the Ostrowski inequality, the Montgomery-type
//! identity behind it, and pass/fail records for the bounds.

use serde::Serialize;

use crate::error::Result;
use crate::funcspace::{check_hypothesis_h_with, ConvexityOrder, FunctionSpec, Interval, DEFAULT_MEMBERSHIP_TOL};
use crate::psibounds::{bound_detail, BoundVariant, Branch};
use crate::quadrature::{integrate_range, ORACLE_TOL};

/// Slack on `rhs - lhs` before a record counts as a violation.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub fn_id: String,
    pub iv: Interval,
    pub x: f64,
    pub s: f64,
    pub variant: BoundVariant,
    pub hypothesis_ok: bool,
    pub tau: f64,
    pub branch: Branch,
    pub psi: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub oracle_err: f64,
}

impl VerificationRecord {
    /// Builds a record, deciding `holds` as `rhs - lhs ≥ -(tol + oracle_err)`.
    #[allow(clippy::too_many_arguments)]
    pub fn decide(
        fn_id: String,
        iv: Interval,
        x: f64,
        s: f64,
        variant: BoundVariant,
        hypothesis_ok: bool,
        tau: f64,
        branch: Branch,
        psi: f64,
        lhs: f64,
        rhs: f64,
        oracle_err: f64,
        tol: f64,
    ) -> Self {
        let margin = rhs - lhs;
        VerificationRecord {
            fn_id,
            iv,
            x,
            s,
            variant,
            hypothesis_ok,
            tau,
            branch,
            psi,
            lhs,
            rhs,
            margin,
            holds: margin >= -(tol + oracle_err),
            oracle_err,
        }
    }

    /// Hypothesis held but the bound did not.
    pub fn is_violation(&self) -> bool {
        self.hypothesis_ok && !self.holds
    }
}

/// `(|f(x) - mean_{[a,b]} f|, error estimate of the mean)`.
pub fn lhs_deviation(func: &FunctionSpec, iv: Interval, x: f64) -> Result<(f64, f64)> {
    iv.check_contains(x)?;
    let (integral, err) = func.integral(iv)?;
    Ok(((func.eval(x) - integral / iv.len()).abs(), err / iv.len()))
}

/// `(b-a) ∫₀¹ p(t) f'(ta + (1-t)b) dt` with `p(t) = t` on `[0, c]`,
/// `t - 1` on `(c, 1]`, `c = (b-x)/(b-a)`.
///
/// Integrating each piece by parts shows this equals `mean(f) - f(x)`.
pub fn montgomery_rhs(func: &FunctionSpec, iv: Interval, x: f64) -> Result<f64> {
    Ok(montgomery_rhs_with_err(func, iv, x)?.0)
}

pub fn montgomery_rhs_with_err(func: &FunctionSpec, iv: Interval, x: f64) -> Result<(f64, f64)> {
    iv.check_contains(x)?;
    let (a, b) = (iv.a(), iv.b());
    let c = (b - x) / iv.len();
    let at = |t: f64| func.deriv(t * a + (1.0 - t) * b);
    let head = integrate_range(|t| t * at(t), 0.0, c, ORACLE_TOL)?;
    let tail = integrate_range(|t| (t - 1.0) * at(t), c, 1.0, ORACLE_TOL)?;
    Ok((iv.len() * (head.value + tail.value), iv.len() * (head.err_estimate + tail.err_estimate)))
}

/// Checks the hypothesis (on `|f'|^q` for the Hölder variant), evaluates
/// both sides and records the outcome. A failed hypothesis is recorded,
/// not raised.
pub fn verify_inequality(
    func: &FunctionSpec,
    iv: Interval,
    x: f64,
    s: ConvexityOrder,
    variant: BoundVariant,
    grid_n: usize,
) -> Result<VerificationRecord> {
    verify_inequality_with_tol(func, iv, x, s, variant, grid_n, DEFAULT_VERIFY_TOL)
}

pub fn verify_inequality_with_tol(
    func: &FunctionSpec,
    iv: Interval,
    x: f64,
    s: ConvexityOrder,
    variant: BoundVariant,
    grid_n: usize,
    tol: f64,
) -> Result<VerificationRecord> {
    iv.check_contains(x)?;
    let power = variant.q().unwrap_or(1.0);
    let hypothesis = check_hypothesis_h_with(func, iv, s, grid_n, power, DEFAULT_MEMBERSHIP_TOL)?;
    let (lhs, lhs_err) = lhs_deviation(func, iv, x)?;
    let bound = bound_detail(func, iv, x, s, variant)?;
    let rhs_err = bound.psi.err_estimate * bound.scale;
    Ok(VerificationRecord::decide(
        func.id.clone(),
        iv,
        x,
        s.get(),
        variant,
        hypothesis.passed,
        bound.tau.value,
        bound.tau.branch,
        bound.psi.value,
        lhs,
        bound.value,
        lhs_err + rhs_err,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::funcspace::catalog_entry;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn lhs_examples() {
        let (l, e) = lhs_deviation(&catalog_entry("quad").unwrap(), unit(), 0.5).unwrap();
        assert!((l - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(e, 0.0);
        for x in unit().grid(5) {
            assert_eq!(lhs_deviation(&catalog_entry("const").unwrap(), unit(), x).unwrap().0, 0.0);
        }
        let (l, _) = lhs_deviation(&catalog_entry("exp1").unwrap(), unit(), 0.5).unwrap();
        assert!((l - 0.069_560_557_758_917_09).abs() < 1e-15);
        assert!(matches!(lhs_deviation(&catalog_entry("exp1").unwrap(), unit(), 2.0), Err(Error::DomainError { .. })));
    }

    #[test]
    fn lhs_ignores_added_constants() {
        let e = catalog_entry("exp1").unwrap();
        let shifted = FunctionSpec::new("exp+7", |u: f64| u.exp() + 7.0, f64::exp, unit());
        for x in unit().grid(11) {
            let (a, _) = lhs_deviation(&e, unit(), x).unwrap();
            let (b, _) = lhs_deviation(&shifted, unit(), x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn montgomery_examples() {
        // ∫₀^{1/2} 2t(1-t) dt = 1/6 and ∫_{1/2}^1 (t-1) 2(1-t) dt = -1/12.
        let quad = catalog_entry("quad").unwrap();
        let r = montgomery_rhs(&quad, unit(), 0.5).unwrap();
        assert!((r - 1.0 / 12.0).abs() < 1e-15);
        assert!((quad.eval(0.5) - 1.0 / 3.0 + 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(montgomery_rhs(&catalog_entry("const").unwrap(), unit(), 0.3).unwrap(), 0.0);

        let e = catalog_entry("exp1").unwrap();
        let mean = std::f64::consts::E - 1.0;
        assert!((montgomery_rhs(&e, unit(), 1.0).unwrap() - (mean - e.eval(1.0))).abs() < 1e-10);
    }

    #[test]
    fn verify_examples() {
        let e = catalog_entry("exp1").unwrap();
        let s1 = ConvexityOrder::one();
        let r = verify_inequality(&e, unit(), 0.5, s1, BoundVariant::Thm1, 101).unwrap();
        assert!(r.hypothesis_ok && r.holds);
        assert!((r.lhs - 0.069_560_557_758_917_09).abs() < 1e-15);
        assert!((r.rhs - 0.420_839_287_058_788_94).abs() < 1e-14);
        assert_eq!(r.margin, r.rhs - r.lhs);

        let c = catalog_entry("linear").unwrap();
        let r = verify_inequality(&c, unit(), 0.5, s1, BoundVariant::Thm1, 101).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);

        let half = ConvexityOrder::new(0.5).unwrap();
        let r = verify_inequality(&e, unit(), 0.5, half, BoundVariant::Thm1, 101).unwrap();
        assert!(!r.hypothesis_ok);
        assert!(r.rhs.is_finite());
        assert!(!r.is_violation());
    }

    #[test]
    fn decision_rule() {
        let iv = unit();
        let mk = |lhs, rhs, err| {
            VerificationRecord::decide("f".into(), iv, 0.5, 1.0, BoundVariant::Thm1, true, 0.5, Branch::LessThanOne, 0.1, lhs, rhs, err, 1e-9)
        };
        assert!(mk(1.0, 1.0 - 5e-10, 0.0).holds);
        assert!(!mk(1.0, 1.0 - 2e-9, 0.0).holds);
        assert!(mk(1.0, 1.0 - 2e-9, 1e-8).holds);
        assert!(mk(1.0, 1.0 - 2e-9, 0.0).is_violation());
    }
}
