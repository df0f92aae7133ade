//! Spec files, seeded verification runs, and reports.

pub mod report;
pub mod run;
pub mod spec;

pub use report::{Report, ReportBody, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
pub use run::{run, run_body, RunFlags};
pub use spec::{load_spec, parse_spec, ManifoldSpec, SpecFile};
