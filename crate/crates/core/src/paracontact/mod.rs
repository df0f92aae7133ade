//! Almost paracontact metric structures and their pointwise conditions.

pub mod classify;
pub mod condition;
pub mod residual;
pub mod structure;

pub use classify::{classify, CheckResult, Class, ClassEntry, ClassVerdict, Classification, Verdict};
pub use condition::{expand_checks, ConditionId, BUNDLES};
pub use residual::{curvature_identity_k1, curvature_identity_k2, residual_suite, Probe, Residual};
pub use structure::{
    eigendistribution_bases, h_operator, involutivity_residual, levi_form, nijenhuis, projector, APCMStructure,
    Sign,
};
