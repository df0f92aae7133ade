//! Manifold spec files: the JSON data model and its validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expr::parse_with_constants;
use crate::geometry::source::{ComponentFn, CoordinateTensors, FrameSpec};
use crate::geometry::{Chart, Source};
use crate::paracontact::{expand_checks, APCMStructure, Class, ConditionId};
use crate::presets::{Preset, Targets};

/// A matrix or vector entry: a literal or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartBlock {
    pub dimension: usize,
    pub coordinates: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
}

/// Coordinate-basis components. Matrices are row-major: `g[i][j] = g_ij`,
/// `phi[i][j] = φ^i_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinateBlock {
    pub g: Vec<Vec<Entry>>,
    pub phi: Vec<Vec<Entry>>,
    pub xi: Vec<Entry>,
    pub eta: Vec<Entry>,
}

/// Frame `E` with `e[i][a] = (e_a)^i` and constant frame-basis tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameBlock {
    pub e: Vec<Vec<Entry>>,
    pub g_hat: Vec<Vec<f64>>,
    pub phi_hat: Vec<Vec<f64>>,
    pub xi_hat: Vec<f64>,
    pub eta_hat: Vec<f64>,
}

/// Exactly one of the three fields must be present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<CoordinateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numeric {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_separation")]
    pub separation: f64,
    /// Probe tuples `(X, Y, W)` drawn per point.
    #[serde(default = "default_probes")]
    pub probes: usize,
}

fn default_points() -> usize {
    64
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_separation() -> f64 {
    1e-2
}

fn default_probes() -> usize {
    4
}

fn default_checks() -> Vec<String> {
    vec!["all".into()]
}

impl Default for Numeric {
    fn default() -> Self {
        Numeric {
            points: default_points(),
            seed: 0,
            tolerance: default_tolerance(),
            separation: default_separation(),
            probes: default_probes(),
        }
    }
}

impl Numeric {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::validation("numeric", "points must be positive"));
        }
        if self.probes == 0 {
            return Err(Error::validation("numeric", "probes must be positive"));
        }
        // a scaled single-term residual never exceeds 1
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::validation("numeric", "tolerance must lie in (0, 1)"));
        }
        if !(self.separation.is_finite() && self.separation >= self.tolerance) {
            return Err(Error::validation("numeric", "separation must be finite and at least the tolerance"));
        }
        Ok(())
    }
}

/// The spec file as written. Serializing it back gives the normalized form
/// that the digest is taken over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    pub structure: StructureBlock,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default)]
    pub numeric: Numeric,
}

impl SpecFile {
    pub fn for_preset(preset: Preset) -> Self {
        SpecFile {
            chart: None,
            constants: BTreeMap::new(),
            structure: StructureBlock {
                preset: Some(preset),
                ..Default::default()
            },
            checks: default_checks(),
            numeric: Numeric::default(),
        }
    }

    /// Two-space indented JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn digest(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(bytes)))
    }
}

/// A validated spec with every expression parsed.
#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    /// `None` for structures built in code.
    pub file: Option<SpecFile>,
    pub digest: String,
    /// Preset name, or `coordinate` / `frame`.
    pub label: String,
    pub structure: APCMStructure,
    pub checks: Vec<ConditionId>,
    pub numeric: Numeric,
    pub expected_fingerprint: Option<Vec<Class>>,
    pub targets: Targets,
}

impl ManifoldSpec {
    /// Spec for a structure built in code rather than loaded from a file:
    /// all checks, default numerics. The digest covers the label only.
    pub fn for_structure(label: &str, structure: APCMStructure) -> Self {
        let digest = hex::encode(Sha256::digest(label.as_bytes()));
        let checks = ConditionId::all_for(structure.dim());
        ManifoldSpec {
            file: None,
            digest,
            label: label.to_string(),
            structure,
            checks,
            numeric: Numeric::default(),
            expected_fingerprint: None,
            targets: Targets::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<ManifoldSpec> {
    let file: SpecFile = serde_json::from_str(text)?;
    resolve(file)
}

pub fn resolve(file: SpecFile) -> Result<ManifoldSpec> {
    file.numeric.validate()?;
    let s = &file.structure;
    let given = [s.coordinate.is_some(), s.frame.is_some(), s.preset.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(Error::validation(
            "structure",
            "exactly one of `coordinate`, `frame`, `preset` must be given",
        ));
    }
    let chart = file.chart.as_ref().map(chart_from_block).transpose()?;

    let (label, structure, expected_fingerprint, targets) = if let Some(preset) = &s.preset {
        if !file.constants.is_empty() {
            return Err(Error::validation("constants", "constants apply to coordinate and frame structures only"));
        }
        let d = preset.build()?;
        let structure = match chart {
            None => d.structure,
            Some(chart) => {
                if chart.coordinates != d.structure.chart.coordinates {
                    return Err(Error::validation(
                        "chart",
                        format!(
                            "preset `{}` uses coordinates [{}]",
                            preset.name(),
                            d.structure.chart.coordinates.join(", ")
                        ),
                    ));
                }
                APCMStructure::new(chart, d.structure.source)?
            }
        };
        (preset.name().to_string(), structure, d.fingerprint, d.targets)
    } else {
        let chart = chart.ok_or_else(|| Error::validation("chart", "a chart block is required"))?;
        let (label, source) = if let Some(c) = &s.coordinate {
            ("coordinate", Source::Coordinate(coordinate_tensors(c, &chart, &file.constants)?))
        } else if let Some(f) = &s.frame {
            ("frame", Source::Frame(frame_spec(f, &chart, &file.constants)?))
        } else {
            unreachable!("exactly one structure source was checked above")
        };
        (label.to_string(), APCMStructure::new(chart, source)?, None, Targets::default())
    };

    let checks = expand_checks(&file.checks, structure.dim()).map_err(|e| match e {
        Error::Validation { message, .. } => Error::validation("checks", message),
        other => other,
    })?;
    let digest = file.digest()?;
    let numeric = file.numeric;
    Ok(ManifoldSpec {
        file: Some(file),
        digest,
        label,
        structure,
        checks,
        numeric,
        expected_fingerprint,
        targets,
    })
}

fn chart_from_block(c: &ChartBlock) -> Result<Chart> {
    if c.dimension != c.coordinates.len() {
        return Err(Error::validation(
            "chart",
            format!("dimension {} but {} coordinate names", c.dimension, c.coordinates.len()),
        ));
    }
    if c.dimension.is_multiple_of(2) {
        return Err(Error::validation("chart", format!("dimension must be odd, got {}", c.dimension)));
    }
    Chart::new(c.coordinates.clone(), c.bounds.iter().map(|b| (b[0], b[1])).collect())
}

fn entry(e: &Entry, location: String, chart: &Chart, constants: &BTreeMap<String, f64>) -> Result<ComponentFn> {
    let text = match e {
        Entry::Number(v) => return Ok(crate::expr::Expr::constant(*v, &chart.coordinates).into()),
        Entry::Text(t) => t,
    };
    parse_with_constants(text, &chart.coordinates, constants)
        .map(ComponentFn::from)
        .map_err(|source| Error::SpecExpr { location, source })
}

fn vector(
    v: &[Entry],
    name: &str,
    chart: &Chart,
    constants: &BTreeMap<String, f64>,
) -> Result<Vec<ComponentFn>> {
    let m = chart.dim();
    if v.len() != m {
        return Err(Error::validation("structure", format!("`{name}` has {} entries, expected {m}", v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(i, e)| entry(e, format!("structure.{name}[{i}]"), chart, constants))
        .collect()
}

fn matrix(
    rows: &[Vec<Entry>],
    name: &str,
    chart: &Chart,
    constants: &BTreeMap<String, f64>,
) -> Result<Vec<ComponentFn>> {
    let m = chart.dim();
    check_shape(rows.iter().map(Vec::len), rows.len(), name, m)?;
    let mut out = Vec::with_capacity(m * m);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out.push(entry(e, format!("structure.{name}[{i}][{j}]"), chart, constants)?);
        }
    }
    Ok(out)
}

fn check_shape(lens: impl Iterator<Item = usize>, rows: usize, name: &str, m: usize) -> Result<()> {
    let mut lens = lens;
    if rows != m || lens.any(|l| l != m) {
        return Err(Error::validation("structure", format!("`{name}` must be a {m}×{m} matrix")));
    }
    Ok(())
}

fn coordinate_tensors(
    c: &CoordinateBlock,
    chart: &Chart,
    constants: &BTreeMap<String, f64>,
) -> Result<CoordinateTensors> {
    Ok(CoordinateTensors {
        g: matrix(&c.g, "coordinate.g", chart, constants)?,
        phi: matrix(&c.phi, "coordinate.phi", chart, constants)?,
        xi: vector(&c.xi, "coordinate.xi", chart, constants)?,
        eta: vector(&c.eta, "coordinate.eta", chart, constants)?,
    })
}

fn frame_spec(f: &FrameBlock, chart: &Chart, constants: &BTreeMap<String, f64>) -> Result<FrameSpec> {
    let m = chart.dim();
    let flat = |rows: &[Vec<f64>], name: &str| -> Result<Vec<f64>> {
        check_shape(rows.iter().map(Vec::len), rows.len(), name, m)?;
        Ok(rows.concat())
    };
    let vec_len = |v: &[f64], name: &str| -> Result<()> {
        if v.len() != m {
            return Err(Error::validation("structure", format!("`{name}` has {} entries, expected {m}", v.len())));
        }
        Ok(())
    };
    vec_len(&f.xi_hat, "frame.xi_hat")?;
    vec_len(&f.eta_hat, "frame.eta_hat")?;
    Ok(FrameSpec {
        e: matrix(&f.e, "frame.e", chart, constants)?,
        g_hat: flat(&f.g_hat, "frame.g_hat")?,
        phi_hat: flat(&f.phi_hat, "frame.phi_hat")?,
        xi_hat: f.xi_hat.clone(),
        eta_hat: f.eta_hat.clone(),
    })
}
