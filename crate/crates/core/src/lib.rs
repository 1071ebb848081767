//! Numerical univalence criteria for meromorphic functions on the exterior
//! unit disk `|zeta| > 1`.
//!
//! * [`jet`]: order-3 complex jets, pre-Schwarzian and Schwarzian.
//! * [`catalog`]: the function catalog, h-functions and the branch-tracked
//!   power `(g'/f')^alpha`.
//! * [`criteria`]: the general criterion and its specializations.
//! * [`scan`]: supremum estimation over the exterior disk and verdicts.
//! * [`loewner`]: the associated Loewner chain and its audits.
//! * [`oracle`]: value-only ground truth (winding numbers, finite
//!   differences, injectivity search).
//! * [`cli`]: the `univalence` command-line front end.

pub mod catalog;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod jet;
pub mod loewner;
pub mod oracle;
pub mod report;
pub mod scan;

pub use catalog::{
    make_h_function, make_sigma_function, power_branch, validate_h_admissible,
    validate_sigma_normalization, HFunction, HSpec, MeromorphicFn, SigmaClass, SigmaSpec,
};
pub use criteria::{corollary_lhs, theorem1_lhs, Criterion, CriterionParams};
pub use error::{Error, Result};
pub use jet::{derivatives_of, jet_combine, pre_schwarzian, schwarzian, ComplexJet, JetOp};
pub use loewner::{
    audit_pommerenke, chain_eval, chain_p, chain_w, extract_a1, subordination_check, AuditReport,
    ChainSpec,
};
pub use oracle::{fd_derivatives, injectivity_scan, winding_number, CollisionReport};
pub use scan::{estimate_sup, issue_verdict, sample_exterior, Outcome, SamplingPlan, SupReport, Verdict};
