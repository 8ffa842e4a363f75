use ostrowski_core::funcspace::{catalog_entry, ClassTag};
use ostrowski_core::harness::{run_suite, SuiteConfig, HYPOTHESIS_GRID};
use ostrowski_core::ostrowski::{lhs_deviation, verify_inequality_with_tol};
use ostrowski_core::pdfapp::{distribution, distributions, pdf_bound};
use ostrowski_core::psibounds::{bound_corollary_m_detail, reflect_problem, tau_of};
use ostrowski_core::quadrature::{certify, classical_error_bound, midpoint_sum, uniform_partition, CertificateOptions};
use ostrowski_core::{catalog, BoundVariant, Branch, ConvexityOrder, Error, HolderPair, Interval, Result};
use serde_json::json;

use crate::args::{BoundArgs, BoundKind, CertificateKind, Cli, Command, IntegrateArgs, PdfArgs, VerifyArgs};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
    /// Why a successful run still exits non-zero.
    pub note: Option<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, exit_code: EXIT_OK, note: None }
    }

    fn failing(report: Report, note: impl Into<String>) -> Self {
        Outcome { report, exit_code: EXIT_UNSUPPORTED, note: Some(note.into()) }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_unsupported() {
        EXIT_UNSUPPORTED
    } else {
        EXIT_INVALID
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if !(cli.tol >= 0.0) || !cli.tol.is_finite() {
        return Err(Error::InvalidArgument(format!("--tol {} must be finite and non-negative", cli.tol)));
    }
    match &cli.command {
        Command::Bound(args) => bound(args, cli.tol),
        Command::Verify(args) => verify(args, cli.tol),
        Command::Integrate(args) => integrate(args, cli.tol),
        Command::Pdf(args) => pdf(args, cli.tol),
        Command::Catalog => Ok(Outcome::ok(catalog_report())),
    }
}

fn judged(report: Report) -> Outcome {
    if report.details.get("hypothesis_ok").and_then(|v| v.as_bool()) == Some(false) {
        Outcome::failing(report, "hypothesis not satisfied on the check grid; the bound is not guaranteed")
    } else if report.holds != Some(true) {
        Outcome::failing(report, "bound violated")
    } else {
        Outcome::ok(report)
    }
}

fn variant_for(q: Option<f64>) -> Result<BoundVariant> {
    Ok(match q {
        Some(q) => BoundVariant::Thm2(HolderPair::from_q(q)?),
        None => BoundVariant::Thm1,
    })
}

fn interval(a: Option<f64>, b: Option<f64>, default: Interval) -> Result<Interval> {
    Interval::new(a.unwrap_or(default.a()), b.unwrap_or(default.b()))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("{flag} is required")))
}

fn bound(args: &BoundArgs, tol: f64) -> Result<Outcome> {
    let s = ConvexityOrder::new(args.s)?;
    let name = match args.kind {
        BoundKind::Thm1 => "thm1",
        BoundKind::Thm2 => "thm2",
        BoundKind::CorollaryM => "corollary-m",
        BoundKind::Midpoint => "midpoint",
    };
    let variant = match args.kind {
        BoundKind::Thm1 => BoundVariant::Thm1,
        BoundKind::Thm2 => variant_for(Some(args.q.unwrap_or(2.0)))?,
        BoundKind::CorollaryM | BoundKind::Midpoint => variant_for(args.q)?,
    };
    let mut report = Report::new("bound");
    report.param("kind", name);

    if args.kind == BoundKind::CorollaryM {
        let m = required(args.m, "--m")?;
        let func = args.func.as_deref().map(catalog_entry).transpose()?;
        let default = func.as_ref().map_or(Interval::new(0.0, 1.0)?, |f| f.default_interval);
        let iv = interval(args.a, args.b, default)?;
        let x = required(args.x, "--x")?;
        report
            .param("fn", args.func.clone())
            .param("a", iv.a())
            .param("b", iv.b())
            .param("x", x)
            .param("s", args.s)
            .param("q", variant.q())
            .param("m", m);
        let detail = bound_corollary_m_detail(m, iv, x, s, variant)?;
        report.tau = Some(detail.tau.value);
        report.branch = Some(detail.tau.branch);
        report.psi = Some(detail.psi.value);
        report.rhs = Some(detail.value);
        report.oracle_err = Some(detail.psi.err_estimate * m);
        if let Some(func) = func {
            let (lhs, err) = lhs_deviation(&func, iv, x)?;
            let margin = detail.value - lhs;
            report.lhs = Some(lhs);
            report.margin = Some(margin);
            report.holds = Some(margin >= -(tol + err + detail.psi.err_estimate * m));
            report.detail("note", "the hypothesis |f'| ≤ M is not checked");
            return Ok(judged(report));
        }
        return Ok(Outcome::ok(report));
    }

    let id = required(args.func.as_deref(), "--fn")?;
    let func = catalog_entry(id)?;
    let iv = interval(args.a, args.b, func.default_interval)?;
    let x = match args.kind {
        BoundKind::Midpoint => iv.midpoint(),
        _ => required(args.x, "--x")?,
    };
    report
        .param("fn", id)
        .param("a", iv.a())
        .param("b", iv.b())
        .param("x", x)
        .param("s", args.s)
        .param("q", variant.q())
        .param("reflect", args.reflect);
    iv.check_contains(x)?;

    let mut target = (func, x);
    let mut reflected = false;
    if args.reflect && tau_of(&target.0, iv)?.branch == Branch::GreaterThanOne {
        let (g, _, rx) = reflect_problem(&target.0, iv, x);
        target = (g, rx);
        reflected = true;
    }
    let record = verify_inequality_with_tol(&target.0, iv, target.1, s, variant, HYPOTHESIS_GRID, tol)?;
    report.fill_from(&record);
    report.detail("reflected", reflected);
    if reflected {
        report.detail("x_reflected", target.1);
    }
    Ok(judged(report))
}

fn verify(args: &VerifyArgs, tol: f64) -> Result<Outcome> {
    let cfg = SuiteConfig { fn_filter: args.func.clone(), grid: args.grid, tol };
    let sweep = run_suite(args.suite, &cfg)?;
    let mut report = Report::new("verify");
    report.param("suite", args.suite.name()).param("fn", args.func.clone()).param("grid", args.grid);
    report.holds = Some(sweep.passed());
    report.margin = sweep.worst_margin;
    report
        .detail("summary", &sweep.summary)
        .detail("worst_margin", sweep.worst_margin)
        .detail("checks", &sweep.checks)
        .detail("records", &sweep.records);
    let passed = sweep.passed();
    report.rows = sweep.records;
    if passed {
        Ok(Outcome::ok(report))
    } else {
        let s = &sweep.summary;
        Ok(Outcome::failing(report, format!("{} violations, {} failed checks", s.violations, s.checks_failed)))
    }
}

fn integrate(args: &IntegrateArgs, tol: f64) -> Result<Outcome> {
    let func = catalog_entry(&args.func)?;
    let iv = interval(args.a, args.b, func.default_interval)?;
    let d = uniform_partition(iv, args.n)?;
    let s = ConvexityOrder::new(args.s)?;
    let mut report = Report::new("integrate");
    report
        .param("fn", args.func.as_str())
        .param("a", iv.a())
        .param("b", iv.b())
        .param("n", args.n)
        .param("s", args.s)
        .param("q", args.q)
        .param("bound", args.bound.map(|k| if k == CertificateKind::Prop1 { "prop1" } else { "prop2" }))
        .param("classical_K", args.classical_k)
        .param("reflect", args.reflect);

    let approx = midpoint_sum(&func, &d);
    let (exact, exact_err) = func.integral(iv)?;
    let true_error = exact - approx;
    report.lhs = Some(true_error.abs());
    report.oracle_err = Some(exact_err);
    report.detail("approx", approx).detail("exact", exact).detail("true_error", true_error);

    let classical = args.classical_k.map(|k| classical_error_bound(k, &d)).transpose()?;
    report.detail("classical_bound", classical);

    let certificate = match args.bound {
        None => None,
        Some(kind) => {
            let variant = match kind {
                CertificateKind::Prop1 => BoundVariant::Thm1,
                CertificateKind::Prop2 => variant_for(Some(args.q.unwrap_or(2.0)))?,
            };
            Some(certify(&func, &d, s, variant, CertificateOptions { reflect: args.reflect })?)
        }
    };
    let rhs = match &certificate {
        Some(cert) => {
            report
                .detail("bound", cert.bound)
                .detail("weighted_bound", cert.weighted_bound)
                .detail("weighted_holds", true_error.abs() <= cert.weighted_bound + tol + exact_err)
                .detail("unweighted_form_valid", cert.unweighted_form_valid())
                .detail("per_interval", &cert.per_interval);
            Some(cert.bound)
        }
        None => classical,
    };
    if let Some(rhs) = rhs {
        let margin = rhs - true_error.abs();
        report.rhs = Some(rhs);
        report.margin = Some(margin);
        report.holds = Some(margin >= -(tol + exact_err));
    }
    if report.holds == Some(false) {
        Ok(Outcome::failing(report, "true error exceeds the bound"))
    } else {
        Ok(Outcome::ok(report))
    }
}

fn pdf(args: &PdfArgs, tol: f64) -> Result<Outcome> {
    let dist = distribution(&args.dist)?;
    let s = ConvexityOrder::new(args.s)?;
    let variant = variant_for(args.q)?;
    let mut report = Report::new("pdf");
    report
        .param("dist", args.dist.as_str())
        .param("a", dist.support.a())
        .param("b", dist.support.b())
        .param("x", args.x)
        .param("s", args.s)
        .param("q", args.q);
    let record = pdf_bound(&dist, args.x, s, variant, tol)?;
    report.fill_from(&record);
    report.detail("expectation", dist.expectation).detail("cdf_x", dist.cdf_at(args.x));
    Ok(judged(report))
}

fn catalog_report() -> Report {
    let mut report = Report::new("catalog");
    let functions: Vec<_> = catalog()
        .iter()
        .map(|f| {
            json!({
                "id": f.id,
                "a": f.default_interval.a(),
                "b": f.default_interval.b(),
                "claims": f.claimed_classes.iter().map(ClassTag::to_string).collect::<Vec<_>>(),
                "exact_integral": f.exact_integral.is_some(),
                "excluded": f.excluded_from_theorems(),
            })
        })
        .collect();
    let dists: Vec<_> = distributions()
        .iter()
        .map(|d| json!({"id": d.id, "a": d.support.a(), "b": d.support.b(), "expectation": d.expectation}))
        .collect();
    report.detail("functions", functions).detail("distributions", dists);
    report
}
