//! Exact Kloosterman sums over `F_{p^n}` and machinery for checking their
//! congruences.
//!
//! The crate is layered:
//!
//! - [`ff`]: finite fields, trace, power sums over Frobenius-closed exponent sets.
//! - [`cyclo`]: exact arithmetic in `Z[zeta_p]` and integer polynomials.
//! - [`kloos`]: Kloosterman sums, their conjugates, characteristic and minimal
//!   polynomials, and the congruence checks built on them.
//! - [`padic`]: truncated p-adic arithmetic, Teichmuller lifts, the p-adic gamma
//!   function and Gauss sums from the Gross-Koblitz formula. This is an
//!   independent route to the same congruences.
//! - [`verify`]: deterministic parallel sweeps over a field and report output.

mod arith;
pub mod cyclo;
pub mod ff;
pub mod kloos;
pub mod padic;
pub mod verify;

pub use cyclo::{product_linear, CycInt, CycloError, IntPolynomial};
pub use ff::{build_subset, legendre, make_field, tau, FFElem, FieldCtx, FieldError, SubsetKind, SubsetSpec};
pub use kloos::{kloosterman, CheckId, CongruenceReport, KloosEngine, KloostermanValue, MinPolyResult, Witness};
pub use verify::{emit_report, parse_field_spec, run_verification, ReportFormat, Scope, SweepReport, VerificationJob};
