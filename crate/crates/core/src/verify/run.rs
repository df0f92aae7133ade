//! Seeded sampling, engine self-tests, condition aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::frame::{
    christoffel_asymmetry, conformal_flatness, d_squared, first_bianchi, inverse_defect, metric_compatibility,
    riemann_pair_antisymmetry, sectional_curvature, Depth, PointFrame,
};
use crate::geometry::source::Components;
use crate::geometry::Source;
use crate::paracontact::classify::CLASSIFY_INPUTS;
use crate::paracontact::{classify, expand_checks, residual_suite, CheckResult, ConditionId, Probe, Residual, Verdict};

use super::report::{CurvatureSummary, Range, Report, ReportBody, SamplingSummary, SelfTest, TargetDeviations};
use super::spec::ManifoldSpec;

/// Multiplier on the point budget bounding the number of candidates drawn.
pub const RESAMPLE_FACTOR: usize = 10;
/// Step of the central differences the jet partials are compared against.
pub const FD_STEP: f64 = 1e-5;
/// Mixed into the seed for the probe-vector streams.
const PROBE_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;

/// Command-line overrides of the spec's `checks` and `numeric` blocks.
#[derive(Debug, Clone, Default)]
pub struct RunFlags {
    pub checks: Option<Vec<String>>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

/// Engine self-tests: name and threshold on the max over points.
pub const SELF_TESTS: [(&str, f64); 7] = [
    ("metric-compatibility", 1e-9),
    ("christoffel-symmetry", 1e-12),
    ("first-bianchi", 1e-7),
    ("riemann-pair-antisymmetry", 1e-7),
    ("d-squared", 1e-8),
    ("inverse-metric", 1e-10),
    ("jet-vs-fd", 1e-5),
];

/// Extra self-tests for hypersurface structures.
pub const EMBEDDING_SELF_TESTS: [(&str, f64); 2] = [("embedding-quadric", 1e-10), ("embedding-normal", 1e-10)];

/// Everything measured at one accepted point.
#[derive(Debug, Clone)]
struct PointEval {
    residuals: Vec<Residual>,
    self_tests: Vec<f64>,
    sectional: Vec<f64>,
    scalar: f64,
    scalar_star: f64,
    conformal: f64,
}

/// Probe tuples for candidate `index`, independent of how candidates are
/// batched.
pub fn probes_for(seed: u64, index: usize, m: usize, count: usize) -> Vec<Probe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ PROBE_SEED_MIX);
    rng.set_stream(index as u64);
    let mut v = || DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
    (0..count).map(|_| Probe::new(v(), v(), v())).collect()
}

fn nan_to_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Max relative difference `|jet − fd| / max(1, |jet|)` between the jet
/// partials of the structure components and central differences.
pub fn jet_fd_defect(source: &Source, p: &[f64]) -> Result<f64> {
    let (_, partials) = source.components_with_partials::<f64>(p)?;
    let flat = |c: &Components<f64>| -> Vec<f64> { [&c.g[..], &c.phi, &c.xi, &c.eta].concat() };
    let mut worst: f64 = 0.0;
    for (k, dk) in partials.iter().enumerate() {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[k] += FD_STEP;
        minus[k] -= FD_STEP;
        let (cp, cm) = (flat(&source.components(&plus)?), flat(&source.components(&minus)?));
        for ((jet, a), b) in flat(dk).iter().zip(&cp).zip(&cm) {
            let fd = (a - b) / (2.0 * FD_STEP);
            worst = worst.max(nan_to_inf((jet - fd).abs() / jet.abs().max(1.0)));
        }
    }
    Ok(worst)
}

fn evaluate(spec: &ManifoldSpec, conditions: &[ConditionId], p: &[f64], probes: &[Probe]) -> Result<PointEval> {
    let structure = &spec.structure;
    let m = structure.dim();
    let depth = if m == 3 { Depth::Cotton } else { Depth::Curvature };
    let pf: PointFrame = structure.point_frame(p, depth)?;

    let mut residuals = Vec::with_capacity(conditions.len());
    for &id in conditions {
        let tuples = if id.uses_probes() { probes } else { &probes[..1] };
        let mut r = Residual::ZERO;
        for probe in tuples {
            let v = residual_suite(&pf, id, probe)?;
            r = r.max(Residual {
                raw: nan_to_inf(v.raw),
                scaled: nan_to_inf(v.scaled),
            });
        }
        residuals.push(r);
    }

    let mut self_tests = vec![
        metric_compatibility(&pf).0,
        christoffel_asymmetry(&pf),
        first_bianchi(&pf).1,
        riemann_pair_antisymmetry(&pf),
        d_squared(&pf),
        inverse_defect(&pf),
        jet_fd_defect(&structure.source, p)?,
    ];
    if let Source::Hypersurface(h) = &structure.source {
        let (quad, nn) = h.embedding_residuals(p)?;
        self_tests.push(quad.abs());
        self_tests.push(nn.abs());
    }
    let self_tests = self_tests.into_iter().map(nan_to_inf).collect();

    let sectional = probes
        .iter()
        .filter_map(|pr| match sectional_curvature(&pf, &pr.x, &pr.y) {
            Err(Error::DegeneratePlane { .. }) => None,
            other => Some(other),
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(PointEval {
        residuals,
        self_tests,
        sectional,
        scalar: pf.scalar(),
        scalar_star: pf.scalar_star(),
        conformal: conformal_flatness(&pf)?,
    })
}

/// Conditions evaluated for a request: the requested ones plus everything
/// the classifier reads.
fn computed_conditions(requested: &[ConditionId], dim: usize) -> Vec<ConditionId> {
    let set: BTreeSet<ConditionId> = requested
        .iter()
        .copied()
        .chain(CLASSIFY_INPUTS.iter().copied().filter(|c| c.applies_to(dim)))
        .collect();
    set.into_iter().collect()
}

pub fn run(spec: &ManifoldSpec, flags: &RunFlags) -> Result<Report> {
    let start = Instant::now();
    let body = run_body(spec, flags)?;
    Ok(Report {
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        report: body,
    })
}

/// The deterministic part of [`run`].
pub fn run_body(spec: &ManifoldSpec, flags: &RunFlags) -> Result<ReportBody> {
    let mut numeric = spec.numeric;
    if let Some(p) = flags.points {
        numeric.points = p;
    }
    if let Some(s) = flags.seed {
        numeric.seed = s;
    }
    if let Some(t) = flags.tolerance {
        numeric.tolerance = t;
        numeric.separation = numeric.separation.max(t);
    }
    numeric.validate()?;
    let m = spec.dim();
    let requested = match &flags.checks {
        Some(list) => expand_checks(list, m)?,
        None => spec.checks.clone(),
    };
    let conditions = computed_conditions(&requested, m);

    let wanted = numeric.points;
    let budget = wanted * RESAMPLE_FACTOR;
    let mut point_rng = ChaCha8Rng::seed_from_u64(numeric.seed);
    let mut accepted: Vec<PointEval> = Vec::with_capacity(wanted);
    let mut attempts = 0;
    let mut rejected = 0;
    let mut last_rejection = String::new();
    while accepted.len() < wanted {
        if attempts >= budget {
            return Err(Error::SamplingExhausted {
                accepted: accepted.len(),
                wanted,
                attempts,
                last: last_rejection,
            });
        }
        let batch = (wanted - accepted.len()).min(budget - attempts);
        let candidates: Vec<(usize, Vec<f64>)> = (0..batch)
            .map(|i| (attempts + i, spec.structure.chart.sample(&mut point_rng)))
            .collect();
        attempts += batch;
        let evals: Vec<Result<PointEval>> = candidates
            .par_iter()
            .map(|(idx, p)| evaluate(spec, &conditions, p, &probes_for(numeric.seed, *idx, m, numeric.probes)))
            .collect();
        for e in evals {
            match e {
                Ok(pe) if accepted.len() < wanted => accepted.push(pe),
                Ok(_) => {}
                Err(e) if e.is_resampleable() => {
                    rejected += 1;
                    last_rejection = e.to_string();
                }
                Err(e) => return Err(e),
            }
        }
    }

    let tol = numeric.tolerance;
    let mut all_results = BTreeMap::new();
    for (k, &id) in conditions.iter().enumerate() {
        let r = accepted.iter().fold(Residual::ZERO, |a, pe| a.max(pe.residuals[k]));
        all_results.insert(id, CheckResult::new(id, wanted, r.raw, r.scaled, tol));
    }
    let checks: Vec<CheckResult> = requested.iter().map(|id| all_results[id].clone()).collect();

    let mut tests: Vec<(&str, f64)> = SELF_TESTS.to_vec();
    if matches!(spec.structure.source, Source::Hypersurface(_)) {
        tests.extend(EMBEDDING_SELF_TESTS);
    }
    let self_tests = tests
        .iter()
        .enumerate()
        .map(|(k, &(name, threshold))| {
            let max = accepted.iter().fold(0.0f64, |a, pe| a.max(pe.self_tests[k]));
            SelfTest::new(name, max, threshold)
        })
        .collect();

    let curvature = summarize_curvature(spec, &accepted);
    let classification = classify(&all_results, m, numeric.separation)?;
    let fingerprint_matches = spec
        .expected_fingerprint
        .as_ref()
        .map(|fp| sorted(fp.clone()) == sorted(classification.fingerprint.clone()));

    Ok(ReportBody {
        spec_digest: spec.digest.clone(),
        structure: spec.label.clone(),
        dimension: m,
        seed: numeric.seed,
        points: wanted,
        probes: numeric.probes,
        tolerance: tol,
        separation: numeric.separation,
        sampling: SamplingSummary {
            accepted: wanted,
            attempts,
            rejected,
        },
        self_tests,
        checks,
        curvature,
        classification,
        expected_fingerprint: spec.expected_fingerprint.clone(),
        fingerprint_matches,
    })
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

fn summarize_curvature(spec: &ManifoldSpec, points: &[PointEval]) -> CurvatureSummary {
    let sectional: Vec<f64> = points.iter().flat_map(|p| p.sectional.iter().copied()).collect();
    let scalar: Vec<f64> = points.iter().map(|p| p.scalar).collect();
    let scalar_star: Vec<f64> = points.iter().map(|p| p.scalar_star).collect();
    let deviation = |target: Option<f64>, values: &[f64]| {
        target.map(|t| values.iter().fold(0.0f64, |a, v| a.max(nan_to_inf((v - t).abs()))))
    };
    let t = &spec.targets;
    let targets = (t.sectional_curvature.is_some() || t.scalar_curvature.is_some() || t.scalar_star_curvature.is_some())
        .then(|| TargetDeviations {
            sectional: deviation(t.sectional_curvature, &sectional),
            scalar: deviation(t.scalar_curvature, &scalar),
            scalar_star: deviation(t.scalar_star_curvature, &scalar_star),
        });
    CurvatureSummary {
        planes: sectional.len(),
        sectional: Range::of(&sectional),
        scalar: Range::of(&scalar),
        scalar_star: Range::of(&scalar_star),
        conformal_max: points.iter().fold(0.0f64, |a, p| a.max(nan_to_inf(p.conformal))),
        targets,
    }
}

impl SelfTest {
    pub fn new(name: &str, max: f64, threshold: f64) -> Self {
        SelfTest {
            name: name.to_string(),
            max,
            threshold,
            verdict: if max <= threshold { Verdict::Pass } else { Verdict::Fail },
        }
    }
}
