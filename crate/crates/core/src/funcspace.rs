//! Test functions, convexity-class membership checks and the built-in catalog.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_range, ORACLE_TOL};

/// Slack allowed on lattice margins, relative to `max(1, |lhs|, |rhs|)`,
/// absorbing round-off in equality cases.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-12;

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type IntegralEvaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A closed interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn check_contains(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::DomainError { x, a: self.a, b: self.b })
        }
    }

    /// `n` equally spaced points from `a` to `b` inclusive.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let step = self.len() / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n - 1).map(|i| self.a + i as f64 * step).collect();
        pts.push(self.b);
        pts
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// The order `s ∈ (0, 1]` of an s-logarithmic convexity class.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct ConvexityOrder(f64);

impl ConvexityOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s <= 1.0 {
            Ok(ConvexityOrder(s))
        } else {
            Err(Error::InvalidOrder(s))
        }
    }

    pub fn one() -> Self {
        ConvexityOrder(1.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", content = "s")]
pub enum ClassTag {
    LogConvex,
    SLogFirst(f64),
    SLogSecond(f64),
    HypothesisH(f64),
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::LogConvex => write!(f, "log-convex"),
            ClassTag::SLogFirst(s) => write!(f, "s-log-convex-first(s={s})"),
            ClassTag::SLogSecond(s) => write!(f, "s-log-convex-second(s={s})"),
            ClassTag::HypothesisH(s) => write!(f, "H(s={s})"),
        }
    }
}

/// A differentiable test function with its analytic derivative.
///
/// `LogConvex`, `SLogFirst` and `SLogSecond` claims refer to `f` itself;
/// `HypothesisH` claims refer to `|f'|` on the default interval.
#[derive(Clone)]
pub struct FunctionSpec {
    pub id: String,
    pub f: Evaluator,
    pub fprime: Evaluator,
    pub exact_integral: Option<IntegralEvaluator>,
    pub claimed_classes: Vec<ClassTag>,
    pub default_interval: Interval,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("id", &self.id)
            .field("exact_integral", &self.exact_integral.is_some())
            .field("claimed_classes", &self.claimed_classes)
            .field("default_interval", &self.default_interval)
            .finish()
    }
}

impl FunctionSpec {
    pub fn new<F, D>(id: impl Into<String>, f: F, fprime: D, default_interval: Interval) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        FunctionSpec {
            id: id.into(),
            f: Arc::new(f),
            fprime: Arc::new(fprime),
            exact_integral: None,
            claimed_classes: Vec::new(),
            default_interval,
        }
    }

    pub fn with_integral<I>(mut self, integral: I) -> Self
    where
        I: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.exact_integral = Some(Arc::new(integral));
        self
    }

    pub fn with_claims(mut self, claims: &[ClassTag]) -> Self {
        self.claimed_classes = claims.to_vec();
        self
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn deriv(&self, u: f64) -> f64 {
        (self.fprime)(u)
    }

    /// `∫_a^b f` and its error estimate (0 when the exact antiderivative is used).
    pub fn integral(&self, iv: Interval) -> Result<(f64, f64)> {
        match &self.exact_integral {
            Some(exact) => Ok((exact(iv.a(), iv.b()), 0.0)),
            None => {
                let r = integrate_range(|u| self.eval(u), iv.a(), iv.b(), ORACLE_TOL)?;
                Ok((r.value, r.err_estimate))
            }
        }
    }

    /// Whether τ is defined on `iv` (both endpoint derivative magnitudes non-zero).
    pub fn endpoint_derivatives_nonzero(&self, iv: Interval) -> bool {
        self.deriv(iv.a()) != 0.0 && self.deriv(iv.b()) != 0.0
    }

    /// Catalog entries with a vanishing endpoint derivative on their
    /// default interval cannot enter theorem verification.
    pub fn excluded_from_theorems(&self) -> bool {
        !self.endpoint_derivatives_nonzero(self.default_interval)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub class: ClassTag,
    pub grid_n: usize,
    /// Minimum of RHS − LHS over the lattice.
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    /// No point falls short by more than `tol · max(1, |lhs|, |rhs|)`.
    pub passed: bool,
    /// Lattice points whose combination fell outside the interval.
    pub skipped: usize,
    pub tol: f64,
}

struct MarginTracker {
    worst: f64,
    witness: Option<Witness>,
    checked: usize,
    /// Largest shortfall relative to `max(1, |lhs|, |rhs|)`.
    worst_relative: f64,
}

impl MarginTracker {
    fn new() -> Self {
        MarginTracker { worst: f64::INFINITY, witness: None, checked: 0, worst_relative: f64::INFINITY }
    }

    fn record(&mut self, lhs: f64, rhs: f64, t: f64, x: f64, y: f64) {
        let margin = rhs - lhs;
        self.checked += 1;
        self.worst_relative = self.worst_relative.min(margin / lhs.abs().max(rhs.abs()).max(1.0));
        if margin < self.worst || self.witness.is_none() {
            self.worst = margin;
            self.witness = Some(Witness { t, x, y });
        }
    }

    fn into_report(self, class: ClassTag, grid_n: usize, skipped: usize, tol: f64) -> MembershipReport {
        MembershipReport {
            class,
            grid_n,
            worst_margin: self.worst,
            witness: self.witness,
            passed: self.worst_relative >= -tol,
            skipped,
            tol,
        }
    }
}

fn positive_values(func: &FunctionSpec, pts: &[f64]) -> Result<Vec<f64>> {
    pts.iter()
        .map(|&u| {
            let v = func.eval(u);
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::NonPositiveValue { at: u, value: v })
            }
        })
        .collect()
}

fn eval_positive(func: &FunctionSpec, u: f64) -> Result<f64> {
    let v = func.eval(u);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NonPositiveValue { at: u, value: v })
    }
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < 3 {
        Err(Error::InvalidGrid(grid_n))
    } else {
        Ok(())
    }
}

/// Brute-force check of `f(tx + (1-t)y) ≤ f(x)^{t^s} f(y)^{(1-t)^s}` on a
/// `grid_n³` lattice over `iv × iv × [0, 1]`.
pub fn check_slog_second(
    func: &FunctionSpec,
    iv: Interval,
    s: ConvexityOrder,
    grid_n: usize,
) -> Result<MembershipReport> {
    check_grid(grid_n)?;
    let s = s.get();
    let pts = iv.grid(grid_n);
    let vals = positive_values(func, &pts)?;
    let ts = Interval::new(0.0, 1.0)?.grid(grid_n);

    let mut tracker = MarginTracker::new();
    for (&x, &fx) in pts.iter().zip(&vals) {
        for (&y, &fy) in pts.iter().zip(&vals) {
            for &t in &ts {
                let z = (t * x + (1.0 - t) * y).clamp(iv.a(), iv.b());
                let lhs = eval_positive(func, z)?;
                let rhs = fx.powf(t.powf(s)) * fy.powf((1.0 - t).powf(s));
                tracker.record(lhs, rhs, t, x, y);
            }
        }
    }
    Ok(tracker.into_report(ClassTag::SLogSecond(s), grid_n, 0, DEFAULT_MEMBERSHIP_TOL))
}

/// Brute-force check of `f(αx + βy) ≤ f(x)^{α^s} f(y)^{β^s}` with
/// `β = (1 - α^s)^{1/s}`. Combinations leaving `iv` are skipped and counted.
pub fn check_slog_first(
    func: &FunctionSpec,
    iv: Interval,
    s: ConvexityOrder,
    grid_n: usize,
) -> Result<MembershipReport> {
    check_grid(grid_n)?;
    let s = s.get();
    let pts = iv.grid(grid_n);
    let vals = positive_values(func, &pts)?;
    let alphas = Interval::new(0.0, 1.0)?.grid(grid_n);
    let slack = 1e-12 * iv.len();

    let mut tracker = MarginTracker::new();
    let mut skipped = 0;
    for (&x, &fx) in pts.iter().zip(&vals) {
        for (&y, &fy) in pts.iter().zip(&vals) {
            for &alpha in &alphas {
                let alpha_s = alpha.powf(s);
                let beta_s = 1.0 - alpha_s;
                let beta = beta_s.max(0.0).powf(1.0 / s);
                let z = alpha * x + beta * y;
                if z < iv.a() - slack || z > iv.b() + slack {
                    skipped += 1;
                    continue;
                }
                let lhs = eval_positive(func, z.clamp(iv.a(), iv.b()))?;
                let rhs = fx.powf(alpha_s) * fy.powf(beta_s);
                tracker.record(lhs, rhs, alpha, x, y);
            }
        }
    }
    if tracker.checked == 0 {
        return Err(Error::EmptyLattice);
    }
    Ok(tracker.into_report(ClassTag::SLogFirst(s), grid_n, skipped, DEFAULT_MEMBERSHIP_TOL))
}

/// Checks the pointwise bound `|f'(ta + (1-t)b)| ≤ |f'(a)|^{t^s} |f'(b)|^{1-t^s}`
/// on `grid_n` values of `t ∈ [0, 1]`.
pub fn check_hypothesis_h(
    func: &FunctionSpec,
    iv: Interval,
    s: ConvexityOrder,
    grid_n: usize,
) -> Result<MembershipReport> {
    check_hypothesis_h_with(func, iv, s, grid_n, 1.0, DEFAULT_MEMBERSHIP_TOL)
}

/// As [`check_hypothesis_h`] for `|f'|^power` (the Hölder-based bounds
/// need the hypothesis on `|f'|^q`).
pub fn check_hypothesis_h_with(
    func: &FunctionSpec,
    iv: Interval,
    s: ConvexityOrder,
    grid_n: usize,
    power: f64,
    tol: f64,
) -> Result<MembershipReport> {
    check_grid(grid_n)?;
    let (a, b) = (iv.a(), iv.b());
    let da = func.deriv(a).abs();
    let db = func.deriv(b).abs();
    if da == 0.0 {
        return Err(Error::ZeroEndpointDerivative { at: a });
    }
    if db == 0.0 {
        return Err(Error::ZeroEndpointDerivative { at: b });
    }
    let s = s.get();

    let mut tracker = MarginTracker::new();
    for t in Interval::new(0.0, 1.0)?.grid(grid_n) {
        let u = t * a + (1.0 - t) * b;
        let ts = t.powf(s);
        let lhs = func.deriv(u).abs().powf(power);
        let rhs = (da.powf(ts) * db.powf(1.0 - ts)).powf(power);
        tracker.record(lhs, rhs, t, a, b);
    }
    Ok(tracker.into_report(ClassTag::HypothesisH(s), grid_n, 0, tol))
}

/// Builds a function whose derivative magnitude
/// `g(u) = scale · tau0^{((b-u)/(b-a))^s}` meets the pointwise hypothesis
/// with equality on `iv`, so `g(a)/g(b) = tau0`. `f` is recovered from
/// `g` by the oracle integrator with `f(a) = 0`.
pub fn make_equality_family(iv: Interval, s: ConvexityOrder, tau0: f64, scale: f64) -> Result<FunctionSpec> {
    if !(tau0 > 0.0 && tau0 < 1.0) {
        return Err(Error::InvalidTau(tau0));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("scale = {scale} must be positive")));
    }
    let (a, b, len, s_val) = (iv.a(), iv.b(), iv.len(), s.get());

    // Past b the derivative is continued point-symmetrically about
    // (b, scale); the cusp of t^s at b then cancels in central differences.
    let g = move |u: f64| {
        let t = (b - u) / len;
        if t >= 0.0 {
            scale * tau0.powf(t.powf(s_val))
        } else {
            scale * (2.0 - tau0.powf((-t).powf(s_val)))
        }
    };
    let antiderivative = move |u: f64| {
        let inside = u.min(b);
        let mut total = integrate_range(g, a, inside, 1e-14).map(|r| r.value).unwrap_or(f64::NAN);
        if u > b {
            total += integrate_range(g, b, u, 1e-14).map(|r| r.value).unwrap_or(f64::NAN);
        }
        total
    };

    Ok(FunctionSpec::new(
        format!("eqfam(s={s_val},tau0={tau0},scale={scale},[{a},{b}])"),
        antiderivative,
        g,
        iv,
    )
    .with_claims(&[ClassTag::HypothesisH(s_val)]))
}

/// Largest `|f'(u) - (f(u+h) - f(u-h))/2h| / (1 + |f'(u)|)` over an
/// `n`-point grid of `iv`.
pub fn derivative_residual(func: &FunctionSpec, iv: Interval, n: usize, h: f64) -> f64 {
    iv.grid(n)
        .into_iter()
        .map(|u| {
            let exact = func.deriv(u);
            let central = (func.eval(u + h) - func.eval(u - h)) / (2.0 * h);
            (exact - central).abs() / (1.0 + exact.abs())
        })
        .fold(0.0, f64::max)
}

fn unit() -> Interval {
    Interval::new(0.0, 1.0).expect("unit interval")
}

fn build_catalog() -> Vec<FunctionSpec> {
    use ClassTag::*;

    let mut entries = vec![
        FunctionSpec::new("exp1", f64::exp, f64::exp, unit())
            .with_integral(|a, b| b.exp() - a.exp())
            .with_claims(&[LogConvex, SLogFirst(1.0), SLogSecond(1.0), SLogSecond(0.5), HypothesisH(1.0)]),
        FunctionSpec::new("exp2", |u: f64| 0.5 * (2.0 * u).exp(), |u: f64| (2.0 * u).exp(), unit())
            .with_integral(|a, b| 0.25 * ((2.0 * b).exp() - (2.0 * a).exp()))
            .with_claims(&[LogConvex, HypothesisH(1.0)]),
        FunctionSpec::new("expdec", |u: f64| (-u).exp(), |u: f64| -(-u).exp(), unit())
            .with_integral(|a, b| (-a).exp() - (-b).exp())
            .with_claims(&[LogConvex, SLogSecond(1.0)]),
        FunctionSpec::new("sinh", f64::sinh, f64::cosh, unit())
            .with_integral(|a, b| b.cosh() - a.cosh())
            .with_claims(&[HypothesisH(1.0)]),
        FunctionSpec::new(
            "expsq",
            |u: f64| integrate_range(|t: f64| (t * t).exp(), 0.0, u, 1e-14).map(|r| r.value).unwrap_or(f64::NAN),
            |u: f64| (u * u).exp(),
            unit(),
        )
        .with_claims(&[HypothesisH(1.0)]),
        FunctionSpec::new("const", |_| 1.0, |_| 0.0, unit())
            .with_integral(|a, b| b - a)
            .with_claims(&[LogConvex, SLogFirst(0.5), SLogSecond(0.5)]),
        FunctionSpec::new("linear", |u| u, |_| 1.0, unit())
            .with_integral(|a, b| 0.5 * (b * b - a * a))
            .with_claims(&[HypothesisH(0.25), HypothesisH(1.0)]),
        FunctionSpec::new("quad", |u| u * u, |u| 2.0 * u, unit()).with_integral(|a, b| (b * b * b - a * a * a) / 3.0),
    ];

    for (id, s) in [("eqfam_s0.25", 0.25), ("eqfam_s0.5", 0.5), ("eqfam_s0.75", 0.75), ("eqfam_s1", 1.0)] {
        let order = ConvexityOrder::new(s).expect("catalog order");
        let mut member = make_equality_family(unit(), order, 0.5, 1.0).expect("catalog family");
        member.id = id.to_string();
        if s < 1.0 {
            member.claimed_classes.push(HypothesisH(1.0));
        }
        entries.push(member);
    }
    entries
}

/// The built-in function corpus, constructed once.
pub fn catalog() -> &'static [FunctionSpec] {
    static CATALOG: OnceLock<Vec<FunctionSpec>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

pub fn catalog_entry(id: &str) -> Result<FunctionSpec> {
    catalog()
        .iter()
        .find(|e| e.id == id)
        .cloned()
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}
