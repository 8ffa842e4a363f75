//! Bounds on `|Pr(X ≤ x) - (b - E X)/(b - a)|` for a random variable on a
//! finite interval, obtained by applying the Ostrowski-type bounds to its
//! CDF. The derivative entering τ and the hypothesis is the density.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::funcspace::{
    check_hypothesis_h_with, make_equality_family, ConvexityOrder, Evaluator, FunctionSpec, Interval,
    DEFAULT_MEMBERSHIP_TOL,
};
use crate::ostrowski::{VerificationRecord, DEFAULT_VERIFY_TOL};
use crate::psibounds::{bound_detail, BoundVariant, HolderPair};
use crate::quadrature::{integrate_range, ORACLE_TOL};

/// Tolerance for normalisation, CDF endpoints and the expectation identity.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

const VALIDATION_GRID: usize = 101;

/// A density on a bounded support with its CDF and precomputed expectation.
#[derive(Clone)]
pub struct DistributionSpec {
    pub id: String,
    pub support: Interval,
    pub pdf: Evaluator,
    pub cdf: Evaluator,
    pub expectation: f64,
    pub expectation_err: f64,
}

impl fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionSpec")
            .field("id", &self.id)
            .field("support", &self.support)
            .field("expectation", &self.expectation)
            .finish()
    }
}

impl DistributionSpec {
    /// Validates the density/CDF pair and precomputes `E X = b - ∫ F`.
    pub fn from_parts(id: impl Into<String>, support: Interval, pdf: Evaluator, cdf: Evaluator) -> Result<Self> {
        let id = id.into();
        let label = id.clone();
        let invalid = move |msg: String| Error::InvalidDistribution(format!("{label}: {msg}"));
        let (a, b) = (support.a(), support.b());

        let grid = support.grid(VALIDATION_GRID);
        if let Some(&t) = grid.iter().find(|&&t| !(pdf(t) >= 0.0)) {
            return Err(invalid(format!("density {} < 0 at {t}", pdf(t))));
        }
        let mass = integrate_range(|t| pdf(t), a, b, ORACLE_TOL)?.value;
        if (mass - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(invalid(format!("density integrates to {mass}")));
        }
        if cdf(a).abs() > DISTRIBUTION_TOL || (cdf(b) - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(invalid(format!("cdf(a) = {}, cdf(b) = {}", cdf(a), cdf(b))));
        }
        let values: Vec<f64> = grid.iter().map(|&t| cdf(t)).collect();
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("cdf decreases on the validation grid".into()));
        }

        let mut dist = DistributionSpec { id, support, pdf, cdf, expectation: f64::NAN, expectation_err: 0.0 };
        let tail = integrate_range(|t| (dist.cdf)(t), a, b, ORACLE_TOL)?;
        dist.expectation = b - tail.value;
        dist.expectation_err = tail.err_estimate;
        let direct = first_moment(&dist)?;
        if (dist.expectation - direct).abs() > DISTRIBUTION_TOL {
            return Err(invalid(format!("b - ∫F = {} but ∫ t f(t) dt = {direct}", dist.expectation)));
        }
        Ok(dist)
    }

    /// Normalises `density` on `support`; the CDF comes from the oracle.
    pub fn from_density<D>(id: impl Into<String>, support: Interval, density: D) -> Result<Self>
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let density: Evaluator = Arc::new(density);
        let mass = integrate_range(|t| density(t), support.a(), support.b(), 1e-14)?.value;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidDistribution(format!("density mass {mass}")));
        }
        let pdf: Evaluator = {
            let density = density.clone();
            Arc::new(move |t| density(t) / mass)
        };
        let cdf: Evaluator = {
            let pdf = pdf.clone();
            let (a, b) = (support.a(), support.b());
            Arc::new(move |t: f64| {
                let t = t.clamp(a, b);
                integrate_range(|u| pdf(u), a, t, 1e-14).map(|r| r.value).unwrap_or(f64::NAN)
            })
        };
        Self::from_parts(id, support, pdf, cdf)
    }

    /// `λ e^{λt} / (e^{λb} - e^{λa})` on `support`.
    pub fn truncated_exponential(id: impl Into<String>, support: Interval, lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("λ = {lambda} must be finite and non-zero")));
        }
        let (a, b) = (support.a(), support.b());
        let norm = (lambda * b).exp() - (lambda * a).exp();
        let pdf: Evaluator = Arc::new(move |t: f64| lambda * (lambda * t).exp() / norm);
        let cdf: Evaluator = Arc::new(move |t: f64| {
            let t = t.clamp(a, b);
            ((lambda * t).exp() - (lambda * a).exp()) / norm
        });
        Self::from_parts(id, support, pdf, cdf)
    }

    pub fn uniform(id: impl Into<String>, support: Interval) -> Result<Self> {
        let (a, len) = (support.a(), support.len());
        let pdf: Evaluator = Arc::new(move |_| 1.0 / len);
        let cdf: Evaluator = Arc::new(move |t: f64| ((t - a) / len).clamp(0.0, 1.0));
        Self::from_parts(id, support, pdf, cdf)
    }

    pub fn pdf_at(&self, t: f64) -> f64 {
        (self.pdf)(t)
    }

    pub fn cdf_at(&self, t: f64) -> f64 {
        (self.cdf)(t)
    }

    /// The CDF viewed as a differentiable mapping with derivative `pdf`.
    pub fn cdf_as_function(&self) -> FunctionSpec {
        let cdf = self.cdf.clone();
        let pdf = self.pdf.clone();
        FunctionSpec::new(self.id.clone(), move |t| cdf(t), move |t| pdf(t), self.support)
    }
}

/// `∫ t f(t) dt` by the oracle.
pub fn first_moment(dist: &DistributionSpec) -> Result<f64> {
    Ok(integrate_range(|t| t * dist.pdf_at(t), dist.support.a(), dist.support.b(), ORACLE_TOL)?.value)
}

/// `E X = b - ∫_a^b F(t) dt`.
pub fn expectation_of(dist: &DistributionSpec) -> Result<f64> {
    let tail = integrate_range(|t| dist.cdf_at(t), dist.support.a(), dist.support.b(), ORACLE_TOL)?;
    Ok(dist.support.b() - tail.value)
}

/// Bound from the direct kernel, with `pdf(b)` as the derivative scale.
pub fn pdf_bound_thm3(dist: &DistributionSpec, x: f64, s: ConvexityOrder) -> Result<VerificationRecord> {
    pdf_bound(dist, x, s, BoundVariant::Thm1, DEFAULT_VERIFY_TOL)
}

/// Bound from the Hölder kernel; the hypothesis is checked on `pdf^q`.
pub fn pdf_bound_thm4(dist: &DistributionSpec, x: f64, s: ConvexityOrder, pq: HolderPair) -> Result<VerificationRecord> {
    pdf_bound(dist, x, s, BoundVariant::Thm2(pq), DEFAULT_VERIFY_TOL)
}

pub fn pdf_bound(
    dist: &DistributionSpec,
    x: f64,
    s: ConvexityOrder,
    variant: BoundVariant,
    tol: f64,
) -> Result<VerificationRecord> {
    let iv = dist.support;
    iv.check_contains(x)?;
    for end in [iv.a(), iv.b()] {
        if dist.pdf_at(end) == 0.0 {
            return Err(Error::ZeroEndpointDensity { at: end });
        }
    }
    let mapping = dist.cdf_as_function();
    let power = variant.q().unwrap_or(1.0);
    let hypothesis = check_hypothesis_h_with(&mapping, iv, s, VALIDATION_GRID, power, DEFAULT_MEMBERSHIP_TOL)?;
    let bound = bound_detail(&mapping, iv, x, s, variant)?;

    let centre = (iv.b() - dist.expectation) / iv.len();
    let lhs = (dist.cdf_at(x) - centre).abs();
    let oracle_err = dist.expectation_err / iv.len() + bound.psi.err_estimate * bound.scale;
    Ok(VerificationRecord::decide(
        dist.id.clone(),
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
        oracle_err,
        tol,
    ))
}

fn build_distributions() -> Vec<DistributionSpec> {
    let unit = Interval::new(0.0, 1.0).expect("unit interval");
    let half = ConvexityOrder::new(0.5).expect("order");
    let family = make_equality_family(unit, half, 0.5, 1.0).expect("family");
    let g = family.fprime.clone();
    vec![
        DistributionSpec::truncated_exponential("texp1", unit, 1.0).expect("texp1"),
        DistributionSpec::truncated_exponential("texp2", unit, 2.0).expect("texp2"),
        DistributionSpec::from_density("eqdens", unit, move |t| g(t)).expect("eqdens"),
        DistributionSpec::uniform("uniform", unit).expect("uniform"),
        DistributionSpec::from_density("ramp", unit, |t| 2.0 * t).expect("ramp"),
    ]
}

/// Built-in distributions on `[0, 1]`:
///
/// * `texp1`, `texp2`: truncated exponentials with λ = 1, 2.
/// * `eqdens`: the normalised equality-family density for s = 1/2, τ₀ = 1/2.
/// * `uniform`: constant density (τ = 1).
/// * `ramp`: density `2t`, which vanishes at `a` so τ is undefined.
pub fn distributions() -> &'static [DistributionSpec] {
    static DISTS: OnceLock<Vec<DistributionSpec>> = OnceLock::new();
    DISTS.get_or_init(build_distributions)
}

pub fn distribution(id: &str) -> Result<DistributionSpec> {
    distributions()
        .iter()
        .find(|d| d.id == id)
        .cloned()
        .ok_or_else(|| Error::UnknownDistribution(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psibounds::{psi2_at_one, Branch};

    fn s1() -> ConvexityOrder {
        ConvexityOrder::one()
    }

    #[test]
    fn expectations() {
        let u = distribution("uniform").unwrap();
        assert!((expectation_of(&u).unwrap() - 0.5).abs() < 1e-15);
        let t = distribution("texp1").unwrap();
        let c = 1.0 / (std::f64::consts::E - 1.0);
        assert!((expectation_of(&t).unwrap() - c).abs() < 1e-14);
        assert!((t.expectation - 0.581_976_706_869_326_4).abs() < 1e-14);

        let iv = Interval::new(-1.0, 3.0).unwrap();
        let sym = DistributionSpec::from_density("bump", iv, |t: f64| 1.0 + (t - 1.0).powi(2)).unwrap();
        assert!((sym.expectation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn builtins_satisfy_invariants() {
        for d in distributions() {
            let e = expectation_of(d).unwrap();
            assert!((e - first_moment(d).unwrap()).abs() <= DISTRIBUTION_TOL, "{}", d.id);
            assert!((d.cdf_at(d.support.a())).abs() <= DISTRIBUTION_TOL);
            assert!((d.cdf_at(d.support.b()) - 1.0).abs() <= DISTRIBUTION_TOL);
        }
    }

    #[test]
    fn rejects_invalid_densities() {
        let unit = Interval::new(0.0, 1.0).unwrap();
        let pdf: Evaluator = Arc::new(|_| 2.0);
        let cdf: Evaluator = Arc::new(|t| 2.0 * t);
        assert!(matches!(DistributionSpec::from_parts("bad", unit, pdf, cdf), Err(Error::InvalidDistribution(_))));
        let pdf: Evaluator = Arc::new(|t| 2.0 - 4.0 * t);
        let cdf: Evaluator = Arc::new(|t| 2.0 * t - 2.0 * t * t);
        assert!(matches!(DistributionSpec::from_parts("neg", unit, pdf, cdf), Err(Error::InvalidDistribution(_))));
        assert!(DistributionSpec::from_density("zero", unit, |_| 0.0).is_err());
    }

    #[test]
    fn theorem3_truncated_exponential() {
        let t = distribution("texp1").unwrap();
        let r = pdf_bound_thm3(&t, 0.5, s1()).unwrap();
        assert!(r.hypothesis_ok && r.holds);
        assert!((r.lhs - 0.040_482_624_332_528_14).abs() < 1e-14);
        assert!((r.rhs - 0.244_918_662_403_709_13).abs() < 1e-14);
        assert!((r.tau - (-1.0_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn theorem3_endpoints_and_zero_lhs() {
        let t = distribution("texp1").unwrap();
        let r = pdf_bound_thm3(&t, 1.0, s1()).unwrap();
        assert!((r.lhs - t.expectation).abs() < 1e-15);
        assert!(r.holds);

        // cdf(x) = 1 - E at x = ln(1 + (1-E)(e-1)).
        let c = 1.0 / (std::f64::consts::E - 1.0);
        let x = (1.0 + (1.0 - c) / c).ln();
        let r = pdf_bound_thm3(&t, x, s1()).unwrap();
        assert!(r.lhs < 1e-15);
    }

    #[test]
    fn theorem4_records() {
        let pq = HolderPair::from_q(2.0).unwrap();
        let t = distribution("texp1").unwrap();
        let r = pdf_bound_thm4(&t, 0.5, s1(), pq).unwrap();
        assert!(r.hypothesis_ok && r.holds);
        assert!((r.rhs - 0.291_654_338_968_295_24).abs() < 1e-14);

        let r = pdf_bound_thm4(&t, 0.0, s1(), pq).unwrap();
        assert!((r.lhs - (1.0 - t.expectation)).abs() < 1e-15);

        let u = distribution("uniform").unwrap();
        let r = pdf_bound_thm4(&u, 0.3, s1(), pq).unwrap();
        assert_eq!(r.branch, Branch::One);
        assert_eq!(r.psi, psi2_at_one(u.support, 0.3));
    }

    #[test]
    fn error_paths() {
        let ramp = distribution("ramp").unwrap();
        assert!(matches!(pdf_bound_thm3(&ramp, 0.5, s1()), Err(Error::ZeroEndpointDensity { at }) if at == 0.0));
        let t = distribution("texp1").unwrap();
        assert!(matches!(pdf_bound_thm3(&t, 1.5, s1()), Err(Error::DomainError { .. })));
        let dec = DistributionSpec::truncated_exponential("dec", Interval::new(0.0, 1.0).unwrap(), -1.0).unwrap();
        assert!(matches!(pdf_bound_thm3(&dec, 0.5, s1()), Err(Error::UnsupportedBranch { .. })));
        assert!(matches!(distribution("nope"), Err(Error::UnknownDistribution(_))));
    }
}
