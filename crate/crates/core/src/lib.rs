//! Ostrowski-type bounds for functions whose derivative magnitude is
//! s-logarithmically convex, composite midpoint quadrature certificates
//! built on them, and a harness that checks every bound numerically.
//!
//! Modules:
//!
//! * [`funcspace`]: intervals, test functions, class-membership checkers.
//! * [`psibounds`]: the Ψ kernels and the bounds built on them.
//! * [`ostrowski`]: left-hand sides, the Montgomery identity, verification records.
//! * [`quadrature`]: oracle integrator, midpoint rule and its certificates.
//! * [`pdfapp`]: bounds relating a CDF to the expectation of a bounded variable.
//! * [`harness`]: sweeps and suites combining all of the above.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod funcspace;
pub mod harness;
pub mod ostrowski;
pub mod pdfapp;
pub mod psibounds;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use funcspace::{catalog, catalog_entry, ConvexityOrder, FunctionSpec, Interval};
pub use psibounds::{BoundVariant, Branch, HolderPair, PsiEvaluation, Tau};
