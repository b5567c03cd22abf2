//! Verification harness for the operator estimates, smoothing rates,
//! parameter lists and a priori bounds.

pub mod conditions;
pub mod experiments;
pub mod fit;
pub mod report;

pub use conditions::{check_conditions_ct, check_conditions_la, LocalParamSet};
pub use report::{CaseReport, Provenance, Verdict};
