//! The Ψ kernels of the Ostrowski-type bounds and their specialisations.
//!
//! Two kernels are provided, each in an integral form (ground truth) and a
//! closed form:
//!
//! * `psi1` for the direct bound
//!   `(b-a) [∫₀^c t τ^{st} dt + ∫_c^1 (1-t) τ^{st} dt]`,
//! * `psi2` for the Hölder-split bound
//!   `(b-a) (p+1)^{1/p} [(∫₀^c t^p)^{1/p} (∫₀^c τ^{sqt})^{1/q} + (∫_c^1 (1-t)^p)^{1/p} (∫_c^1 τ^{sqt})^{1/q}]`,
//!
//! with `c = (b-x)/(b-a)`. Neither kernel includes the `|f'(b)|` factor, and
//! `psi2` excludes `(p+1)^{-1/p}`; the `bound_*` functions apply them.
//!
//! The closed forms are written through [`exprel`] and [`exprel2`], which
//! stay accurate as `τ → 1`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{ConvexityOrder, FunctionSpec, Interval};
use crate::quadrature::integrate_range;
use crate::special::{exprel, exprel2};

pub const DEFAULT_BRANCH_EPSILON: f64 = 1e-9;

/// Tolerance of the inner integrals in the integral forms.
pub const PSI_ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    LessThanOne,
    One,
    GreaterThanOne,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::LessThanOne => "less_than_one",
            Branch::One => "one",
            Branch::GreaterThanOne => "greater_than_one",
        })
    }
}

/// Ratio `|f'(a)| / |f'(b)|` together with the kernel branch it selects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tau {
    pub value: f64,
    pub branch: Branch,
}

impl Tau {
    pub fn new(value: f64) -> Result<Self> {
        Self::classify(value, DEFAULT_BRANCH_EPSILON)
    }

    pub fn classify(value: f64, branch_epsilon: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidArgument(format!("τ = {value} must be finite and positive")));
        }
        let branch = if (value - 1.0).abs() <= branch_epsilon {
            Branch::One
        } else if value < 1.0 {
            Branch::LessThanOne
        } else {
            Branch::GreaterThanOne
        };
        Ok(Tau { value, branch })
    }
}

/// Hölder conjugate exponents `p, q > 1` with `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderPair {
    p: f64,
    q: f64,
}

impl HolderPair {
    pub fn from_q(q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidHolder { p: f64::NAN, q });
        }
        Ok(HolderPair { p: q / (q - 1.0), q })
    }

    pub fn new(p: f64, q: f64) -> Result<Self> {
        if p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite() && (1.0 / p + 1.0 / q - 1.0).abs() <= 1e-12 {
            Ok(HolderPair { p, q })
        } else {
            Err(Error::InvalidHolder { p, q })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `(p+1)^{-1/p}`.
    pub fn prefactor(&self) -> f64 {
        (self.p + 1.0).powf(-1.0 / self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    NumericIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiEvaluation {
    pub value: f64,
    pub branch: Branch,
    pub method: Method,
    pub err_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiConfig {
    /// Closed forms refuse `|ln τ|` at or below this value.
    ///
    /// The closed forms are evaluated through series near `ln τ = 0`, so
    /// the default accepts every τ of the `LessThanOne` branch.
    pub closed_form_epsilon: f64,
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig { closed_form_epsilon: 0.0 }
    }
}

/// Which theorem a bound instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundVariant {
    Thm1,
    Thm2(HolderPair),
}

impl BoundVariant {
    pub fn q(&self) -> Option<f64> {
        match self {
            BoundVariant::Thm1 => None,
            BoundVariant::Thm2(pq) => Some(pq.q()),
        }
    }
}

/// A full bound `value = scale · prefactor · psi` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundDetail {
    pub tau: Tau,
    pub psi: PsiEvaluation,
    /// `|f'(b)|`, or `M` for the bounded-derivative forms.
    pub scale: f64,
    pub value: f64,
}

fn position(iv: Interval, x: f64) -> Result<(f64, f64)> {
    iv.check_contains(x)?;
    Ok(((iv.b() - x) / iv.len(), (x - iv.a()) / iv.len()))
}

fn supported(tau: Tau) -> Result<()> {
    if tau.branch == Branch::GreaterThanOne {
        Err(Error::UnsupportedBranch { tau: tau.value })
    } else {
        Ok(())
    }
}

fn non_negative(eval: PsiEvaluation) -> Result<PsiEvaluation> {
    if eval.value >= 0.0 {
        Ok(eval)
    } else {
        Err(Error::NegativeKernel(eval.value))
    }
}

/// `((a-x)² + (b-x)²) / (2(b-a))`.
pub fn psi1_at_one(iv: Interval, x: f64) -> f64 {
    let (a, b) = (iv.a(), iv.b());
    ((a - x).powi(2) + (b - x).powi(2)) / (2.0 * (b - a))
}

/// `((b-x)² + (x-a)²) / (b-a)`.
pub fn psi2_at_one(iv: Interval, x: f64) -> f64 {
    let (a, b) = (iv.a(), iv.b());
    ((b - x).powi(2) + (x - a).powi(2)) / (b - a)
}

fn exact_one(value: f64) -> PsiEvaluation {
    PsiEvaluation { value, branch: Branch::One, method: Method::ClosedForm, err_estimate: 0.0 }
}

pub fn psi1_integral(tau: Tau, s: ConvexityOrder, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    let (c, _) = position(iv, x)?;
    supported(tau)?;
    if tau.branch == Branch::One {
        return Ok(exact_one(psi1_at_one(iv, x)));
    }
    let k = s.get() * tau.value.ln();
    let head = integrate_range(|t| t * (k * t).exp(), 0.0, c, PSI_ORACLE_TOL)?;
    let tail = integrate_range(|t| (1.0 - t) * (k * t).exp(), c, 1.0, PSI_ORACLE_TOL)?;
    non_negative(PsiEvaluation {
        value: iv.len() * (head.value + tail.value),
        branch: tau.branch,
        method: Method::NumericIntegral,
        err_estimate: iv.len() * (head.err_estimate + tail.err_estimate),
    })
}

pub fn psi1_closed(tau: Tau, s: ConvexityOrder, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    psi1_closed_with(&PsiConfig::default(), tau, s, iv, x)
}

/// `(b-a) [c² E₂(kc) + e^k d² E₂(-kd)]` with `k = s ln τ`, `d = 1 - c` and
/// `E₂(u) = (e^u (u-1) + 1)/u²`, which is `∫ t e^{kt} dt = e^{kt}(kt-1)/k²`
/// evaluated over both pieces of the kernel.
pub fn psi1_closed_with(cfg: &PsiConfig, tau: Tau, s: ConvexityOrder, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    let (c, d) = position(iv, x)?;
    supported(tau)?;
    if tau.branch == Branch::One {
        return Ok(exact_one(psi1_at_one(iv, x)));
    }
    let ln_tau = tau.value.ln();
    if ln_tau.abs() <= cfg.closed_form_epsilon {
        return Err(Error::NearSingular { ln_tau });
    }
    let k = s.get() * ln_tau;
    let value = iv.len() * (c * c * exprel2(k * c) + k.exp() * d * d * exprel2(-k * d));
    non_negative(PsiEvaluation { value, branch: tau.branch, method: Method::ClosedForm, err_estimate: 0.0 })
}

pub fn psi2_integral(tau: Tau, s: ConvexityOrder, pq: HolderPair, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    let (c, _) = position(iv, x)?;
    supported(tau)?;
    if tau.branch == Branch::One {
        return Ok(exact_one(psi2_at_one(iv, x)));
    }
    let (p, q) = (pq.p(), pq.q());
    let m = s.get() * q * tau.value.ln();
    let tol = PSI_ORACLE_TOL;
    let pow_head = integrate_range(|t: f64| t.powf(p), 0.0, c, tol)?;
    let exp_head = integrate_range(|t| (m * t).exp(), 0.0, c, tol)?;
    let pow_tail = integrate_range(|t: f64| (1.0 - t).powf(p), c, 1.0, tol)?;
    let exp_tail = integrate_range(|t| (m * t).exp(), c, 1.0, tol)?;

    // First-order propagation of the inner error estimates through A^{1/p} B^{1/q}.
    let term = |a: f64, ea: f64, b: f64, eb: f64| {
        let v = a.powf(1.0 / p) * b.powf(1.0 / q);
        let e = if a > 0.0 && b > 0.0 { v * (ea / (p * a) + eb / (q * b)) } else { 0.0 };
        (v, e)
    };
    let (h, eh) = term(pow_head.value, pow_head.err_estimate, exp_head.value, exp_head.err_estimate);
    let (t, et) = term(pow_tail.value, pow_tail.err_estimate, exp_tail.value, exp_tail.err_estimate);
    let scale = iv.len() * (p + 1.0).powf(1.0 / p);
    non_negative(PsiEvaluation {
        value: scale * (h + t),
        branch: tau.branch,
        method: Method::NumericIntegral,
        err_estimate: scale * (eh + et),
    })
}

pub fn psi2_closed(tau: Tau, s: ConvexityOrder, pq: HolderPair, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    psi2_closed_with(&PsiConfig::default(), tau, s, pq, iv, x)
}

/// `(b-a)^{-1/p} [(b-x)^{(p+1)/p} J₁^{1/q} + (x-a)^{(p+1)/p} J₂^{1/q}]` with
/// `J₁ = (τ^{sqc} - 1)/(sq ln τ)` and `J₂ = (τ^{sq} - τ^{sqc})/(sq ln τ)`,
/// both rewritten via `expm1`.
pub fn psi2_closed_with(
    cfg: &PsiConfig,
    tau: Tau,
    s: ConvexityOrder,
    pq: HolderPair,
    iv: Interval,
    x: f64,
) -> Result<PsiEvaluation> {
    let (c, d) = position(iv, x)?;
    supported(tau)?;
    if tau.branch == Branch::One {
        return Ok(exact_one(psi2_at_one(iv, x)));
    }
    let ln_tau = tau.value.ln();
    if ln_tau.abs() <= cfg.closed_form_epsilon {
        return Err(Error::NearSingular { ln_tau });
    }
    let (p, q) = (pq.p(), pq.q());
    let m = s.get() * q * ln_tau;
    let j1 = c * exprel(m * c);
    let j2 = (m * c).exp() * d * exprel(m * d);
    let expo = (p + 1.0) / p;
    let value = iv.len().powf(-1.0 / p)
        * ((iv.b() - x).powf(expo) * j1.powf(1.0 / q) + (x - iv.a()).powf(expo) * j2.powf(1.0 / q));
    non_negative(PsiEvaluation { value, branch: tau.branch, method: Method::ClosedForm, err_estimate: 0.0 })
}

/// Closed form, falling back to the integral form when it is refused.
pub fn psi1(tau: Tau, s: ConvexityOrder, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    match psi1_closed(tau, s, iv, x) {
        Err(Error::NearSingular { .. }) => psi1_integral(tau, s, iv, x),
        other => other,
    }
}

pub fn psi2(tau: Tau, s: ConvexityOrder, pq: HolderPair, iv: Interval, x: f64) -> Result<PsiEvaluation> {
    match psi2_closed(tau, s, pq, iv, x) {
        Err(Error::NearSingular { .. }) => psi2_integral(tau, s, pq, iv, x),
        other => other,
    }
}

fn kernel(tau: Tau, s: ConvexityOrder, variant: BoundVariant, iv: Interval, x: f64) -> Result<(PsiEvaluation, f64)> {
    match variant {
        BoundVariant::Thm1 => Ok((psi1(tau, s, iv, x)?, 1.0)),
        BoundVariant::Thm2(pq) => Ok((psi2(tau, s, pq, iv, x)?, pq.prefactor())),
    }
}

pub fn tau_of(func: &FunctionSpec, iv: Interval) -> Result<Tau> {
    let da = func.deriv(iv.a()).abs();
    let db = func.deriv(iv.b()).abs();
    if db == 0.0 {
        return Err(Error::ZeroDenominator { at: iv.b() });
    }
    if da == 0.0 {
        return Err(Error::ZeroNumerator { at: iv.a() });
    }
    Tau::new(da / db)
}

/// The selected theorem's bound on `|f(x) - mean(f)|` with its ingredients.
pub fn bound_detail(
    func: &FunctionSpec,
    iv: Interval,
    x: f64,
    s: ConvexityOrder,
    variant: BoundVariant,
) -> Result<BoundDetail> {
    iv.check_contains(x)?;
    let tau = tau_of(func, iv)?;
    let scale = func.deriv(iv.b()).abs();
    let (psi, prefactor) = kernel(tau, s, variant, iv, x)?;
    Ok(BoundDetail { tau, psi, scale, value: scale * prefactor * psi.value })
}

/// `|f'(b)| Ψ₁(τ, s, [a, b], x)`.
pub fn bound_theorem1(func: &FunctionSpec, iv: Interval, x: f64, s: ConvexityOrder) -> Result<f64> {
    Ok(bound_detail(func, iv, x, s, BoundVariant::Thm1)?.value)
}

/// `|f'(b)| (p+1)^{-1/p} Ψ₂(τ, s, [a, b], x)`.
pub fn bound_theorem2(func: &FunctionSpec, iv: Interval, x: f64, s: ConvexityOrder, pq: HolderPair) -> Result<f64> {
    Ok(bound_detail(func, iv, x, s, BoundVariant::Thm2(pq))?.value)
}

/// Bounded-derivative form: both τ and `|f'(b)|` are replaced by `M`.
pub fn bound_corollary_m_detail(
    m: f64,
    iv: Interval,
    x: f64,
    s: ConvexityOrder,
    variant: BoundVariant,
) -> Result<BoundDetail> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("M = {m} must be finite and positive")));
    }
    iv.check_contains(x)?;
    let tau = Tau::new(m)?;
    let (psi, prefactor) = kernel(tau, s, variant, iv, x)?;
    Ok(BoundDetail { tau, psi, scale: m, value: m * prefactor * psi.value })
}

pub fn bound_corollary_m(m: f64, iv: Interval, x: f64, s: ConvexityOrder, variant: BoundVariant) -> Result<f64> {
    Ok(bound_corollary_m_detail(m, iv, x, s, variant)?.value)
}

/// The general bound evaluated at `x = (a+b)/2`.
pub fn midpoint_detail(func: &FunctionSpec, iv: Interval, s: ConvexityOrder, variant: BoundVariant) -> Result<BoundDetail> {
    bound_detail(func, iv, iv.midpoint(), s, variant)
}

pub fn bound_midpoint(func: &FunctionSpec, iv: Interval, s: ConvexityOrder, variant: BoundVariant) -> Result<f64> {
    Ok(midpoint_detail(func, iv, s, variant)?.value)
}

/// Maps the problem through `g(u) = f(a+b-u)`: the mean over `iv` is
/// unchanged, `x` moves to `a+b-x` and τ is inverted. Claimed classes are
/// dropped since the hypothesis must be re-checked on `g`.
pub fn reflect_problem(func: &FunctionSpec, iv: Interval, x: f64) -> (FunctionSpec, Interval, f64) {
    let sum = iv.a() + iv.b();
    let f = func.f.clone();
    let fp = func.fprime.clone();
    let mut reflected = FunctionSpec::new(
        format!("{}~reflected", func.id),
        move |u| f(sum - u),
        move |u| -fp(sum - u),
        iv,
    );
    if let Some(exact) = func.exact_integral.clone() {
        reflected = reflected.with_integral(move |lo, hi| exact(sum - hi, sum - lo));
    }
    (reflected, iv, sum - x)
}
