use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ostrowski_core::harness::Suite;
use ostrowski_core::ostrowski::DEFAULT_VERIFY_TOL;

#[derive(Debug, Parser)]
#[command(name = "ostrowski", version, about = "Ostrowski-type bounds, sweeps and midpoint-rule certificates")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the report as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Slack on rhs - lhs before a record counts as failing.
    #[arg(long, global = true, default_value_t = DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound and compare it with the actual deviation.
    Bound(BoundArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Composite midpoint rule with error certificates.
    Integrate(IntegrateArgs),
    /// CDF-versus-expectation bound for a built-in distribution.
    Pdf(PdfArgs),
    /// List built-in functions and distributions.
    Catalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Thm1,
    Thm2,
    CorollaryM,
    Midpoint,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub kind: BoundKind,
    /// Catalog function id.
    #[arg(long = "fn", value_name = "ID")]
    pub func: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Hölder exponent; selects the Hölder variant for corollary-m and midpoint.
    #[arg(long)]
    pub q: Option<f64>,
    /// Derivative bound for corollary-m.
    #[arg(long)]
    pub m: Option<f64>,
    /// Map the problem through u -> a + b - u when τ > 1.
    #[arg(long)]
    pub reflect: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "default", value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long = "fn", value_name = "ID")]
    pub func: Option<String>,
    /// x-values per interval for the psi-oracle suite.
    #[arg(long)]
    pub grid: Option<usize>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: ostrowski_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertificateKind {
    Prop1,
    Prop2,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct IntegrateArgs {
    #[arg(long = "fn", value_name = "ID")]
    pub func: String,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Number of equal subintervals.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub bound: Option<CertificateKind>,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long)]
    pub q: Option<f64>,
    /// Bound K on |f''| for the classical certificate.
    #[arg(long = "classical-K", value_name = "K")]
    pub classical_k: Option<f64>,
    #[arg(long)]
    pub reflect: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PdfArgs {
    #[arg(long, value_name = "ID")]
    pub dist: String,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Use the Hölder variant with this q.
    #[arg(long)]
    pub q: Option<f64>,
}
