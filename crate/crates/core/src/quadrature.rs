//! Oracle integration, partitions and certified composite midpoint sums.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{ConvexityOrder, FunctionSpec, Interval};
use crate::psibounds::{self, Branch, BoundVariant};

/// Default ceiling on integrand evaluations per oracle call.
pub const DEFAULT_EVAL_BUDGET: usize = 1_000_000;

/// Environment variable that overrides [`DEFAULT_EVAL_BUDGET`].
pub const EVAL_BUDGET_ENV: &str = "OSTROWSKI_EVAL_BUDGET";

/// Tolerance used wherever the oracle stands in for an exact integral.
pub const ORACLE_TOL: f64 = 1e-12;

/// Evaluation budget, read once from `OSTROWSKI_EVAL_BUDGET` if set.
pub fn eval_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(EVAL_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n >= GK_POINTS)
            .unwrap_or(DEFAULT_EVAL_BUDGET)
    })
}

// Gauss-Kronrod 10/21 abscissae on [-1, 1] (non-negative half, descending)
// and weights. Odd indices of XGK are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const GK_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    resabs: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |u: f64| {
        let v = f(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { at: u })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut resabs = WGK[10] * fc.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Segment {
        lo,
        hi,
        value: kronrod * half,
        err: ((kronrod - gauss) * half).abs(),
        resabs: resabs * half.abs(),
    })
}

/// Globally adaptive Gauss-Kronrod (10/21) integration of `f` over `iv`.
///
/// The segment with the largest `|K21 - G10|` is bisected until the summed
/// estimate drops below `tol` (or below the round-off floor
/// `50 ε ∫|f|`, whichever is larger). Subdivision order is fixed, so
/// results are bit-for-bit reproducible.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, iv: Interval, tol: f64) -> Result<QuadResult> {
    integrate_range_with_budget(&f, iv.a(), iv.b(), tol, eval_budget())
}

/// As [`adaptive_integrate`], but accepts any ordered pair of limits
/// (`lo == hi` gives 0, `lo > hi` flips the sign).
pub fn integrate_range<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
    integrate_range_with_budget(&f, lo, hi, tol, eval_budget())
}

pub fn integrate_range_with_budget<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadResult> {
    if !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration over [{lo}, {hi}] at tolerance {tol}"
        )));
    }
    if lo == hi {
        return Ok(QuadResult { value: 0.0, err_estimate: 0.0, evaluations: 0 });
    }
    if lo > hi {
        let r = integrate_range_with_budget(f, hi, lo, tol, budget)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }

    let mut segments = vec![gk21(f, lo, hi)?];
    let mut evaluations = GK_POINTS;
    loop {
        let err: f64 = segments.iter().map(|s| s.err).sum();
        let resabs: f64 = segments.iter().map(|s| s.resabs).sum();
        let floor = 50.0 * f64::EPSILON * resabs;
        if err <= tol.max(floor) {
            break;
        }

        let (worst, seg) = segments
            .iter()
            .enumerate()
            .fold((0, segments[0]), |acc, (i, s)| if s.err > acc.1.err { (i, *s) } else { acc });
        let mid = 0.5 * (seg.lo + seg.hi);
        if evaluations + 2 * GK_POINTS > budget || mid <= seg.lo || mid >= seg.hi {
            return Err(Error::ToleranceNotReached { achieved: err, tol, evaluations });
        }
        segments[worst] = gk21(f, seg.lo, mid)?;
        segments.push(gk21(f, mid, seg.hi)?);
        evaluations += 2 * GK_POINTS;
    }

    segments.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    Ok(QuadResult {
        value: segments.iter().map(|s| s.value).sum(),
        err_estimate: segments.iter().map(|s| s.err).sum(),
        evaluations,
    })
}

/// Strictly increasing nodes `a = x₀ < x₁ < … < x_n = b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    nodes: Vec<f64>,
}

impl Partition {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPartition(format!("{} node(s); need at least 2", nodes.len())));
        }
        if let Some(bad) = nodes.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPartition(format!("non-finite node {bad}")));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!("nodes {} and {} not increasing", w[0], w[1])));
        }
        Ok(Partition { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of subintervals.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.nodes[0], self.nodes[self.nodes.len() - 1]).expect("validated nodes")
    }

    pub fn subintervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.nodes.windows(2).map(|w| Interval::new(w[0], w[1]).expect("validated nodes"))
    }
}

pub fn uniform_partition(iv: Interval, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::InvalidPartition("n must be at least 1".into()));
    }
    let h = iv.len() / n as f64;
    let mut nodes: Vec<f64> = (0..n).map(|i| iv.a() + i as f64 * h).collect();
    nodes.push(iv.b());
    Partition::new(nodes)
}

/// `M(f, d) = Σ (x_{i+1} - x_i) f((x_i + x_{i+1}) / 2)`.
pub fn midpoint_sum(func: &FunctionSpec, d: &Partition) -> f64 {
    d.subintervals().map(|sub| sub.len() * func.eval(sub.midpoint())).sum()
}

/// `(K / 24) Σ (x_{i+1} - x_i)³`, with `K = sup |f''|` supplied by the caller.
pub fn classical_error_bound(k: f64, d: &Partition) -> Result<f64> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("K = {k} must be finite and non-negative")));
    }
    Ok(k / 24.0 * d.subintervals().map(|sub| sub.len().powi(3)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CertificateOptions {
    /// Reflect subintervals whose τ exceeds 1 instead of failing.
    pub reflect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateTerm {
    pub lo: f64,
    pub hi: f64,
    pub tau: f64,
    pub branch: Branch,
    pub psi: f64,
    pub term: f64,
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeCertificate {
    /// `M(f, d)`.
    pub approx: f64,
    /// Plain sum of the per-subinterval midpoint bounds.
    pub bound: f64,
    /// Sum of the per-subinterval bounds each scaled by its width. This is
    /// the dimensionally consistent error bound; it is no larger than
    /// `bound` whenever every subinterval is at most one unit long.
    pub weighted_bound: f64,
    /// Signed `E_M = ∫f - M(f, d)` against the exact or oracle integral.
    pub true_error: Option<f64>,
    pub per_interval: Vec<CertificateTerm>,
}

impl CompositeCertificate {
    /// True when every subinterval has width ≤ 1, the regime in which
    /// `bound` dominates `weighted_bound`.
    pub fn unweighted_form_valid(&self) -> bool {
        self.per_interval.iter().all(|t| t.hi - t.lo <= 1.0)
    }
}

pub fn em_bound_prop1(func: &FunctionSpec, d: &Partition, s: ConvexityOrder) -> Result<CompositeCertificate> {
    certify(func, d, s, BoundVariant::Thm1, CertificateOptions::default())
}

pub fn em_bound_prop2(
    func: &FunctionSpec,
    d: &Partition,
    s: ConvexityOrder,
    pq: psibounds::HolderPair,
) -> Result<CompositeCertificate> {
    certify(func, d, s, BoundVariant::Thm2(pq), CertificateOptions::default())
}

/// Applies the midpoint specialisation of the selected theorem on every
/// subinterval of `d` and sums the terms in node order.
pub fn certify(
    func: &FunctionSpec,
    d: &Partition,
    s: ConvexityOrder,
    variant: BoundVariant,
    opts: CertificateOptions,
) -> Result<CompositeCertificate> {
    let subs: Vec<Interval> = d.subintervals().collect();
    let per_interval = subs
        .par_iter()
        .map(|&sub| certificate_term(func, sub, s, variant, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut bound = 0.0;
    let mut weighted_bound = 0.0;
    for t in &per_interval {
        bound += t.term;
        weighted_bound += (t.hi - t.lo) * t.term;
    }
    let approx = midpoint_sum(func, d);
    let (exact, _) = func.integral(d.interval())?;
    Ok(CompositeCertificate {
        approx,
        bound,
        weighted_bound,
        true_error: Some(exact - approx),
        per_interval,
    })
}

fn certificate_term(
    func: &FunctionSpec,
    sub: Interval,
    s: ConvexityOrder,
    variant: BoundVariant,
    opts: CertificateOptions,
) -> Result<CertificateTerm> {
    let tau = psibounds::tau_of(func, sub)?;
    let (detail, reflected) = if tau.branch == Branch::GreaterThanOne {
        if !opts.reflect {
            return Err(Error::UnsupportedBranch { tau: tau.value });
        }
        let (g, riv, _) = psibounds::reflect_problem(func, sub, sub.midpoint());
        (psibounds::midpoint_detail(&g, riv, s, variant)?, true)
    } else {
        (psibounds::midpoint_detail(func, sub, s, variant)?, false)
    };
    Ok(CertificateTerm {
        lo: sub.a(),
        hi: sub.b(),
        tau: detail.tau.value,
        branch: detail.tau.branch,
        psi: detail.psi.value,
        term: detail.value,
        reflected,
    })
}
