//! Report types and their JSON / text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::paracontact::{CheckResult, Class, Classification, Verdict};

/// Exit status for a finished run: every requested check, self-test, and
/// expected fingerprint matched.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
/// Spec, sampling, or consistency errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// First key, so dropping its line leaves the deterministic body.
    pub wall_clock_seconds: f64,
    pub report: ReportBody,
}

#[derive(Serialize)]
struct BodyOnly<'a> {
    report: &'a ReportBody,
}

/// Pure function of the spec, seed, point count, and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub spec_digest: String,
    pub structure: String,
    pub dimension: usize,
    pub seed: u64,
    pub points: usize,
    pub probes: usize,
    pub tolerance: f64,
    pub separation: f64,
    pub sampling: SamplingSummary,
    pub self_tests: Vec<SelfTest>,
    pub checks: Vec<CheckResult>,
    pub curvature: CurvatureSummary,
    pub classification: Classification,
    pub expected_fingerprint: Option<Vec<Class>>,
    pub fingerprint_matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSummary {
    pub accepted: usize,
    pub attempts: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTest {
    pub name: String,
    #[serde(deserialize_with = "crate::paracontact::classify::residual")]
    pub max: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn of(values: &[f64]) -> Option<Range> {
        let first = *values.first()?;
        Some(values.iter().fold(Range { min: first, max: first }, |r, &v| Range {
            min: r.min.min(v),
            max: r.max.max(v),
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    /// Nondegenerate probe planes that entered `sectional`.
    pub planes: usize,
    pub sectional: Option<Range>,
    pub scalar: Option<Range>,
    pub scalar_star: Option<Range>,
    #[serde(deserialize_with = "crate::paracontact::classify::residual")]
    pub conformal_max: f64,
    /// Max deviation from the preset's known values, when it has any.
    pub targets: Option<TargetDeviations>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDeviations {
    pub sectional: Option<f64>,
    pub scalar: Option<f64>,
    pub scalar_star: Option<f64>,
}

impl ReportBody {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
            && self.self_tests.iter().all(|t| t.verdict == Verdict::Pass)
            && self.fingerprint_matches != Some(false)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    /// The [`Report`] JSON without its wall-clock line, as stored in golden
    /// files.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&BodyOnly { report: self })?;
        s.push('\n');
        Ok(s)
    }
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let b = &self.report;
        let mut s = String::new();
        let _ = writeln!(s, "structure   {} (dimension {})", b.structure, b.dimension);
        let _ = writeln!(s, "spec        {}", b.spec_digest);
        let _ = writeln!(
            s,
            "sampling    {} points, seed {}, {} attempts, {} rejected",
            b.points, b.seed, b.sampling.attempts, b.sampling.rejected
        );
        let _ = writeln!(s, "tolerance   {:e} (separation {:e})", b.tolerance, b.separation);
        let _ = writeln!(s, "\nself-tests");
        for t in &b.self_tests {
            let _ = writeln!(s, "  {:<28} {:>10.3e}  ≤ {:<8.0e} {}", t.name, t.max, t.threshold, verdict(t.verdict));
        }
        let _ = writeln!(s, "\nchecks{:>33}{:>12}", "raw", "scaled");
        for c in &b.checks {
            let _ = writeln!(
                s,
                "  {:<24} {:>12.3e} {:>11.3e}  {}",
                c.id.id(),
                c.max_raw,
                c.max_scaled,
                verdict(c.verdict)
            );
        }
        let c = &b.curvature;
        let _ = writeln!(s, "\ncurvature");
        let range = |r: &Option<Range>| r.map_or("-".to_string(), |r| format!("[{:.9}, {:.9}]", r.min, r.max));
        let _ = writeln!(s, "  sectional   {} over {} planes", range(&c.sectional), c.planes);
        let _ = writeln!(s, "  scalar      {}", range(&c.scalar));
        let _ = writeln!(s, "  scalar*     {}", range(&c.scalar_star));
        let _ = writeln!(s, "  conformal   {:.3e}", c.conformal_max);
        let _ = writeln!(s, "\nclassification");
        for e in &b.classification.classes {
            let v = serde_json::to_value(e.verdict).ok();
            let v = v.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
            let _ = writeln!(s, "  {:<28} {}", e.class.name(), v);
        }
        let names: Vec<&str> = b.classification.fingerprint.iter().map(|c| c.name()).collect();
        let _ = writeln!(s, "  fingerprint {{{}}}", names.join(", "));
        if let Some(ok) = b.fingerprint_matches {
            let _ = writeln!(s, "  expected    {}", if ok { "match" } else { "MISMATCH" });
        }
        let _ = writeln!(
            s,
            "\n{} in {:.2}s",
            if b.passed() { "PASS" } else { "FAIL" },
            self.wall_clock_seconds
        );
        s
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
    }
}
