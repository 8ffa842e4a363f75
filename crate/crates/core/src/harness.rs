//! Verification suites: oracle agreement of the Ψ kernels, the Montgomery
//! identity, soundness sweeps over the catalog, quadrature certificates,
//! the CDF application and class-membership claims.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{
    catalog, check_hypothesis_h, check_slog_first, check_slog_second, ClassTag, ConvexityOrder, FunctionSpec,
    Interval,
};
use crate::ostrowski::{montgomery_rhs, verify_inequality_with_tol, VerificationRecord, DEFAULT_VERIFY_TOL};
use crate::pdfapp::{distributions, expectation_of, first_moment, pdf_bound, DISTRIBUTION_TOL};
use crate::psibounds::{
    psi1_at_one, psi1_closed, psi1_integral, psi2_at_one, psi2_closed, psi2_integral, reflect_problem, tau_of,
    bound_midpoint, BoundVariant, Branch, HolderPair, Tau,
};
use crate::quadrature::{
    certify, classical_error_bound, midpoint_sum, uniform_partition, CertificateOptions,
};

/// Points per interval for x-sweeps.
pub const SWEEP_X_POINTS: usize = 11;
/// Grid for pointwise hypothesis checks inside sweeps.
pub const HYPOTHESIS_GRID: usize = 101;
/// Lattice size for the brute-force convexity checks.
pub const LATTICE_GRID: usize = 21;

pub const PSI_ORACLE_REL_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const TAU_ONE_TOL: f64 = 1e-14;
pub const CONTINUITY_TOL: f64 = 1e-6;

pub const SWEEP_ORDERS: [f64; 2] = [0.5, 1.0];
pub const SWEEP_Q: [f64; 2] = [2.0, 3.0];
pub const PSI_TAUS: [f64; 7] = [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.999];
pub const PSI_ORDERS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const PSI_Q: [f64; 3] = [1.5, 2.0, 3.0];
pub const CERTIFICATE_NS: [usize; 5] = [1, 2, 4, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Default,
    Lemma1,
    PsiOracle,
    Branch,
    Soundness,
    Certificates,
    Pdf,
    Membership,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Default,
        Suite::Lemma1,
        Suite::PsiOracle,
        Suite::Branch,
        Suite::Soundness,
        Suite::Certificates,
        Suite::Pdf,
        Suite::Membership,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Default => "default",
            Suite::Lemma1 => "lemma1",
            Suite::PsiOracle => "psi-oracle",
            Suite::Branch => "branch",
            Suite::Soundness => "soundness",
            Suite::Certificates => "certificates",
            Suite::Pdf => "pdf",
            Suite::Membership => "membership",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Restricts catalog-driven suites to one function id.
    pub fn_filter: Option<String>,
    /// Number of x-values per interval in the Ψ oracle suite (default 5).
    pub grid: Option<usize>,
    /// Slack for `holds` in verification records.
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { fn_filter: None, grid: None, tol: DEFAULT_VERIFY_TOL }
    }
}

/// A scalar check: `observed` compared against `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `observed ≤ threshold`.
    pub fn at_most(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Check { name: name.into(), observed, threshold, passed: observed <= threshold }
    }

    /// Passes when `observed ≥ threshold`.
    pub fn at_least(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Check { name: name.into(), observed, threshold, passed: observed >= threshold }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub hypothesis_ok: usize,
    pub holds: usize,
    pub violations: usize,
    /// Catalog entries skipped because τ is undefined on their interval.
    pub excluded: usize,
    pub checks: usize,
    pub checks_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub suite: Suite,
    pub records: Vec<VerificationRecord>,
    pub checks: Vec<Check>,
    pub summary: Summary,
    /// Smallest margin among records whose hypothesis held.
    pub worst_margin: Option<f64>,
}

impl SweepReport {
    fn assemble(suite: Suite, records: Vec<VerificationRecord>, checks: Vec<Check>, excluded: usize) -> Self {
        let summary = Summary {
            total: records.len(),
            hypothesis_ok: records.iter().filter(|r| r.hypothesis_ok).count(),
            holds: records.iter().filter(|r| r.holds).count(),
            violations: records.iter().filter(|r| r.is_violation()).count(),
            excluded,
            checks: checks.len(),
            checks_failed: checks.iter().filter(|c| !c.passed).count(),
        };
        let worst_margin = records.iter().filter(|r| r.hypothesis_ok).map(|r| r.margin).reduce(f64::min);
        SweepReport { suite, records, checks, summary, worst_margin }
    }

    pub fn passed(&self) -> bool {
        self.summary.violations == 0 && self.summary.checks_failed == 0
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SweepReport> {
    let (records, checks, excluded) = match suite {
        Suite::Default => {
            let mut records = Vec::new();
            let mut checks = Vec::new();
            let mut excluded = 0;
            for part in &Suite::ALL[1..] {
                let r = run_suite(*part, cfg)?;
                records.extend(r.records);
                checks.extend(r.checks);
                excluded += r.summary.excluded;
            }
            (records, checks, excluded)
        }
        Suite::Lemma1 => (Vec::new(), lemma1_checks(cfg)?, 0),
        Suite::PsiOracle => (Vec::new(), psi_oracle_checks(cfg.grid.unwrap_or(5))?, 0),
        Suite::Branch => (Vec::new(), branch_checks()?, 0),
        Suite::Soundness => {
            let (records, excluded) = soundness_records(cfg)?;
            (records, Vec::new(), excluded)
        }
        Suite::Certificates => (Vec::new(), certificate_checks()?, 0),
        Suite::Pdf => {
            let (records, checks, excluded) = pdf_suite(cfg)?;
            (records, checks, excluded)
        }
        Suite::Membership => (Vec::new(), membership_checks(cfg)?, 0),
    };
    Ok(SweepReport::assemble(suite, records, checks, excluded))
}

fn selected(cfg: &SuiteConfig) -> Result<Vec<&'static FunctionSpec>> {
    let all = catalog();
    match &cfg.fn_filter {
        None => Ok(all.iter().collect()),
        Some(id) => {
            let hit: Vec<_> = all.iter().filter(|f| &f.id == id).collect();
            if hit.is_empty() {
                Err(Error::UnknownFunction(id.clone()))
            } else {
                Ok(hit)
            }
        }
    }
}

fn unit() -> Interval {
    Interval::new(0.0, 1.0).expect("unit interval")
}

/// Largest `|montgomery_rhs - (mean - f(x))|` per function, plus the
/// `f = u²` value at the midpoint when that function is selected.
pub fn lemma1_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let funcs = selected(cfg)?;
    let mut checks = funcs
        .par_iter()
        .map(|func| {
            let iv = func.default_interval;
            let (integral, _) = func.integral(iv)?;
            let mean = integral / iv.len();
            let mut worst: f64 = 0.0;
            for x in iv.grid(SWEEP_X_POINTS) {
                worst = worst.max((montgomery_rhs(func, iv, x)? - (mean - func.eval(x))).abs());
            }
            Ok(Check::at_most(format!("lemma1 {}", func.id), worst, IDENTITY_TOL))
        })
        .collect::<Result<Vec<_>>>()?;
    if funcs.iter().any(|f| f.id == "quad") {
        let quad = funcs.iter().find(|f| f.id == "quad").expect("present");
        let value = montgomery_rhs(quad, unit(), 0.5)?;
        checks.push(Check::at_most("lemma1 quad x=0.5 equals +1/12", (value - 1.0 / 12.0).abs(), 1e-12));
    }
    Ok(checks)
}

/// Relative disagreement between the closed forms and direct quadrature
/// of the defining integrals, maximised over τ, s, q and `x_points`
/// positions on `[0, 1]` and `[2, 5]`.
pub fn psi_oracle_checks(x_points: usize) -> Result<Vec<Check>> {
    if x_points < 2 {
        return Err(Error::InvalidGrid(x_points));
    }
    let intervals = [unit(), Interval::new(2.0, 5.0)?];
    let mut cases = Vec::new();
    for iv in intervals {
        for x in iv.grid(x_points) {
            for tau in PSI_TAUS {
                for s in PSI_ORDERS {
                    cases.push((iv, x, tau, s));
                }
            }
        }
    }
    let (worst1, worst2) = cases
        .par_iter()
        .map(|&(iv, x, tau, s)| -> Result<(f64, f64)> {
            let tau = Tau::new(tau)?;
            let s = ConvexityOrder::new(s)?;
            let w1 = relative(psi1_closed(tau, s, iv, x)?.value, psi1_integral(tau, s, iv, x)?.value);
            let mut w2: f64 = 0.0;
            for q in PSI_Q {
                let pq = HolderPair::from_q(q)?;
                w2 = w2.max(relative(psi2_closed(tau, s, pq, iv, x)?.value, psi2_integral(tau, s, pq, iv, x)?.value));
            }
            Ok((w1, w2))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0_f64, 0.0_f64), |(a, b), (c, d)| (a.max(c), b.max(d)));
    Ok(vec![
        Check::at_most("psi1 closed vs integral (relative)", worst1, PSI_ORACLE_REL_TOL),
        Check::at_most("psi2 closed vs integral (relative)", worst2, PSI_ORACLE_REL_TOL),
    ])
}

fn relative(value: f64, reference: f64) -> f64 {
    let diff = (value - reference).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / reference.abs()
    }
}

/// (s, x) pairs used for the continuity checks at τ → 1.
pub const CONTINUITY_CASES: [(f64, f64); 5] = [(0.25, 0.0), (0.5, 0.3), (0.75, 0.5), (1.0, 0.8), (1.0, 1.0)];

/// τ = 1 values against their elementary closed forms and continuity at τ = 1 - 1e-8.
pub fn branch_checks() -> Result<Vec<Check>> {
    let one = Tau::new(1.0)?;
    let pq = HolderPair::from_q(2.0)?;
    let mut exact1: f64 = 0.0;
    let mut exact2: f64 = 0.0;
    for iv in [unit(), Interval::new(2.0, 5.0)?] {
        for x in iv.grid(SWEEP_X_POINTS) {
            let (a, b) = (iv.a(), iv.b());
            let want1 = ((a - x).powi(2) + (b - x).powi(2)) / (2.0 * (b - a));
            let want2 = ((b - x).powi(2) + (x - a).powi(2)) / (b - a);
            for s in PSI_ORDERS {
                let s = ConvexityOrder::new(s)?;
                exact1 = exact1.max((psi1_closed(one, s, iv, x)?.value - want1).abs());
                exact2 = exact2.max((psi2_closed(one, s, pq, iv, x)?.value - want2).abs());
            }
        }
    }

    let near = Tau::new(1.0 - 1e-8)?;
    let mut cont1: f64 = 0.0;
    let mut cont2: f64 = 0.0;
    let iv = unit();
    for (s, x) in CONTINUITY_CASES {
        let s = ConvexityOrder::new(s)?;
        cont1 = cont1.max((psi1_closed(near, s, iv, x)?.value - psi1_at_one(iv, x)).abs());
        cont2 = cont2.max((psi2_closed(near, s, pq, iv, x)?.value - psi2_at_one(iv, x)).abs());
    }
    Ok(vec![
        Check::at_most("psi1 at tau=1 matches elementary form", exact1, TAU_ONE_TOL),
        Check::at_most("psi2 at tau=1 matches elementary form", exact2, TAU_ONE_TOL),
        Check::at_most("psi1 continuity at tau=1-1e-8", cont1, CONTINUITY_TOL),
        Check::at_most("psi2 continuity at tau=1-1e-8", cont2, CONTINUITY_TOL),
    ])
}

fn sweep_variants() -> Result<Vec<BoundVariant>> {
    let mut v = vec![BoundVariant::Thm1];
    for q in SWEEP_Q {
        v.push(BoundVariant::Thm2(HolderPair::from_q(q)?));
    }
    Ok(v)
}

fn sort_records(records: &mut [VerificationRecord]) {
    records.sort_by(|l, r| {
        l.fn_id
            .cmp(&r.fn_id)
            .then(l.s.total_cmp(&r.s))
            .then(l.x.total_cmp(&r.x))
            .then(l.variant.q().unwrap_or(1.0).total_cmp(&r.variant.q().unwrap_or(1.0)))
    });
}

/// Catalog × s × variant × x. Entries with τ > 1 are swept through the
/// reflection `u ↦ a + b - u`; entries with a vanishing endpoint
/// derivative are counted as excluded.
pub fn soundness_records(cfg: &SuiteConfig) -> Result<(Vec<VerificationRecord>, usize)> {
    let variants = sweep_variants()?;
    let mut problems = Vec::new();
    let mut excluded = 0;
    for func in selected(cfg)? {
        let iv = func.default_interval;
        match tau_of(func, iv) {
            Ok(tau) if tau.branch == Branch::GreaterThanOne => {
                let (g, riv, _) = reflect_problem(func, iv, iv.a());
                problems.push((g, riv));
            }
            Ok(_) => problems.push((func.clone(), iv)),
            Err(e) if e.is_unsupported() => excluded += 1,
            Err(e) => return Err(e),
        }
    }

    let mut tasks = Vec::new();
    for (pi, (_, iv)) in problems.iter().enumerate() {
        for s in SWEEP_ORDERS {
            for &variant in &variants {
                for x in iv.grid(SWEEP_X_POINTS) {
                    tasks.push((pi, s, variant, x));
                }
            }
        }
    }
    let mut records = tasks
        .par_iter()
        .map(|&(pi, s, variant, x)| {
            let (func, iv) = &problems[pi];
            verify_inequality_with_tol(func, *iv, x, ConvexityOrder::new(s)?, variant, HYPOTHESIS_GRID, cfg.tol)
        })
        .collect::<Result<Vec<_>>>()?;
    sort_records(&mut records);
    Ok((records, excluded))
}

/// `|E_M| ≤ bound` for `e^u` on `[0, 1]` at n ∈ {1, 2, 4, 8, 16} for both
/// certificate variants, the n = 1 reduction, and the classical bound on `u²`.
pub fn certificate_checks() -> Result<Vec<Check>> {
    let exp1 = catalog().iter().find(|f| f.id == "exp1").expect("exp1 in catalog");
    let iv = unit();
    let s = ConvexityOrder::one();
    let variants = [BoundVariant::Thm1, BoundVariant::Thm2(HolderPair::from_q(2.0)?)];
    let mut checks = Vec::new();
    for n in CERTIFICATE_NS {
        let d = uniform_partition(iv, n)?;
        for variant in variants {
            let label = match variant {
                BoundVariant::Thm1 => "prop1",
                BoundVariant::Thm2(_) => "prop2",
            };
            let cert = certify(exp1, &d, s, variant, CertificateOptions::default())?;
            let err = cert.true_error.unwrap_or(f64::NAN).abs();
            checks.push(Check::at_most(format!("{label} n={n} true error ≤ bound"), err - cert.bound, 1e-9));
            checks.push(Check::at_most(
                format!("{label} n={n} true error ≤ weighted bound"),
                err - cert.weighted_bound,
                1e-9,
            ));
            if n == 1 {
                let single = bound_midpoint(exp1, iv, s, variant)?;
                checks.push(Check::at_most(format!("{label} n=1 equals midpoint bound"), (cert.bound - single).abs(), 1e-15));
            }
        }
    }

    let quad = catalog().iter().find(|f| f.id == "quad").expect("quad in catalog");
    let d = uniform_partition(iv, 4)?;
    let classical = classical_error_bound(2.0, &d)?;
    let (exact, _) = quad.integral(iv)?;
    let err = exact - midpoint_sum(quad, &d);
    checks.push(Check::at_most("classical bound for u² n=4 equals 1/192", (classical - 1.0 / 192.0).abs(), 1e-12));
    checks.push(Check::at_most("true error for u² n=4 equals 1/192", (err - 1.0 / 192.0).abs(), 1e-12));
    Ok(checks)
}

/// Bounds for every built-in distribution with non-vanishing endpoint
/// density, plus the expectation identity for all of them.
pub fn pdf_suite(cfg: &SuiteConfig) -> Result<(Vec<VerificationRecord>, Vec<Check>, usize)> {
    let variants = [BoundVariant::Thm1, BoundVariant::Thm2(HolderPair::from_q(2.0)?)];
    let mut checks = Vec::new();
    let mut records = Vec::new();
    let mut excluded = 0;
    for dist in distributions() {
        let e = expectation_of(dist)?;
        checks.push(Check::at_most(
            format!("expectation identity {}", dist.id),
            (e - first_moment(dist)?).abs(),
            DISTRIBUTION_TOL,
        ));
        let (a, b) = (dist.support.a(), dist.support.b());
        if dist.pdf_at(a) == 0.0 || dist.pdf_at(b) == 0.0 {
            excluded += 1;
            continue;
        }
        let mut tasks = Vec::new();
        for s in SWEEP_ORDERS {
            for variant in variants {
                for x in dist.support.grid(SWEEP_X_POINTS) {
                    tasks.push((s, variant, x));
                }
            }
        }
        let mut recs = tasks
            .par_iter()
            .map(|&(s, variant, x)| pdf_bound(dist, x, ConvexityOrder::new(s)?, variant, cfg.tol))
            .collect::<Result<Vec<_>>>()?;
        records.append(&mut recs);
    }
    sort_records(&mut records);
    Ok((records, checks, excluded))
}

/// Every claimed class of every selected catalog entry is confirmed by
/// the brute-force checkers, and `e^u` is rejected for the pointwise
/// hypothesis at s = 1/2.
pub fn membership_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut claims = Vec::new();
    for func in selected(cfg)? {
        for &claim in &func.claimed_classes {
            claims.push((func, claim));
        }
    }
    let mut checks = claims
        .par_iter()
        .map(|&(func, claim)| {
            let iv = func.default_interval;
            let report = match claim {
                ClassTag::LogConvex => check_slog_second(func, iv, ConvexityOrder::one(), LATTICE_GRID)?,
                ClassTag::SLogSecond(s) => check_slog_second(func, iv, ConvexityOrder::new(s)?, LATTICE_GRID)?,
                ClassTag::SLogFirst(s) => check_slog_first(func, iv, ConvexityOrder::new(s)?, LATTICE_GRID)?,
                ClassTag::HypothesisH(s) => check_hypothesis_h(func, iv, ConvexityOrder::new(s)?, HYPOTHESIS_GRID)?,
            };
            let mut check = Check::at_least(format!("claim {} {claim}", func.id), report.worst_margin, -report.tol);
            check.passed = report.passed;
            Ok(check)
        })
        .collect::<Result<Vec<_>>>()?;

    if cfg.fn_filter.as_deref().is_none_or(|id| id == "exp1") {
        let exp1 = catalog().iter().find(|f| f.id == "exp1").expect("exp1 in catalog");
        let report = check_hypothesis_h(exp1, unit(), ConvexityOrder::new(0.5)?, HYPOTHESIS_GRID)?;
        // At t = 1/4: e^{3/4} - e^{1/2}.
        let at_quarter = 0.75_f64.exp() - 0.5_f64.exp();
        checks.push(Check::at_most("exp1 rejected for H(s=0.5): worst margin", report.worst_margin, -0.46));
        checks.push(Check::at_least("exp1 H(s=0.5) violation at t=0.25", at_quarter, 0.46));
    }
    Ok(checks)
}
