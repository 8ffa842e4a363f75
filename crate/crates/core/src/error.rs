use thiserror::Error;

/// Errors raised by bound evaluation, membership checks and the oracle integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("convexity order s = {0} outside (0, 1]")]
    InvalidOrder(f64),

    #[error("invalid Hölder pair p = {p}, q = {q}: need p, q > 1 and 1/p + 1/q = 1")]
    InvalidHolder { p: f64, q: f64 },

    #[error("grid size {0} too small (need at least 3)")]
    InvalidGrid(usize),

    #[error("function value {value} at u = {at} is not strictly positive")]
    NonPositiveValue { at: f64, value: f64 },

    #[error("every lattice point fell outside the interval")]
    EmptyLattice,

    #[error("zero endpoint derivative at u = {at}: τ undefined")]
    ZeroEndpointDerivative { at: f64 },

    #[error("zero endpoint density at t = {at}: τ undefined")]
    ZeroEndpointDensity { at: f64 },

    #[error("|f'(b)| = 0 at b = {at}: τ undefined")]
    ZeroDenominator { at: f64 },

    #[error("|f'(a)| = 0 at a = {at}: τ = 0 is outside (0, ∞)")]
    ZeroNumerator { at: f64 },

    #[error("tau0 = {0} outside (0, 1)")]
    InvalidTau(f64),

    #[error("unsupported branch τ>1 (τ = {tau}); try --reflect")]
    UnsupportedBranch { tau: f64 },

    #[error("x = {x} outside [{a}, {b}]")]
    DomainError { x: f64, a: f64, b: f64 },

    #[error("closed form near-singular: |ln τ| = {ln_tau} within threshold")]
    NearSingular { ln_tau: f64 },

    #[error("kernel evaluated to {0} < 0")]
    NegativeKernel(f64),

    #[error(
        "oracle integrator stopped after {evaluations} evaluations with error estimate {achieved:e} > {tol:e}"
    )]
    ToleranceNotReached { achieved: f64, tol: f64, evaluations: usize },

    #[error("integrand is not finite at u = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown function id {0:?}")]
    UnknownFunction(String),

    #[error("unknown distribution id {0:?}")]
    UnknownDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors that describe a problem outside the proven range of the
    /// bounds rather than a malformed input.
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedBranch { .. }
                | Error::ZeroEndpointDerivative { .. }
                | Error::ZeroEndpointDensity { .. }
                | Error::ZeroDenominator { .. }
                | Error::ZeroNumerator { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
