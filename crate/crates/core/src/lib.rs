//! Numerical verification of almost paracontact metric structures.
//!
//! Structures are given by coordinate expressions, by an adapted frame, or
//! as a hypersurface in a flat para-Kähler space. Everything downstream is
//! evaluated with nested forward-mode jets, so no finite differences enter
//! the verdicts.

pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod paracontact;
pub mod presets;
pub mod random;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{parse, Expr, ExprError};
pub use jet::{Jet, Jet1, Jet2, Jet3, Scalar};
pub use verify::{load_spec, run, ManifoldSpec, Report};
