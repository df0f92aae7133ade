//! The built-in example families with their expected classifications.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, parse_with_constants, Expr};
use crate::geometry::source::{ComponentFn, CoordinateTensors, EmbeddedHypersurface, FrameSpec};
use crate::geometry::{Chart, Source};
use crate::paracontact::{APCMStructure, Class};

/// `f` of the `p1` variant that violates involutivity of `D⁺`.
pub const P1_NEGATIVE_F: &str = "x1";

/// Default `f = (c + Σ(x^α)²)/z` of the `p1` family; `c` is substituted
/// at load time.
pub fn p1_default_f(n: usize) -> String {
    format!("(c + {})/z", sum_squares(n))
}

/// Default potential `H = z·Σ(x^α)²` of the `cosymplectic` family.
pub fn cosymplectic_default_h(n: usize) -> String {
    format!("z*({})", sum_squares(n))
}

/// Named preset with its parameters, as stored in spec files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "example", rename_all = "lowercase", deny_unknown_fields)]
pub enum Preset {
    Flat3d,
    Hyperboloid {
        #[serde(default = "one")]
        n: usize,
    },
    P1 {
        #[serde(default = "two")]
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
    Cosymplectic {
        #[serde(default = "one")]
        n: usize,
        #[serde(default, rename = "H", skip_serializing_if = "Option::is_none")]
        h: Option<String>,
    },
}

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

pub const PRESET_NAMES: [&str; 4] = ["flat3d", "hyperboloid", "p1", "cosymplectic"];

impl Preset {
    /// Preset `name` with default parameters, `n` overriding the default
    /// dimension parameter where the family has one.
    pub fn named(name: &str, n: Option<usize>) -> Result<Preset> {
        let p = match name {
            "flat3d" => {
                if n.is_some_and(|n| n != 1) {
                    return Err(Error::validation("structure", "flat3d is three-dimensional (n = 1)"));
                }
                Preset::Flat3d
            }
            "hyperboloid" => Preset::Hyperboloid { n: n.unwrap_or(1) },
            "p1" => Preset::P1 {
                n: n.unwrap_or(2),
                f: None,
                c: None,
            },
            "cosymplectic" => Preset::Cosymplectic {
                n: n.unwrap_or(1),
                h: None,
            },
            other => {
                return Err(Error::validation(
                    "structure",
                    format!("unknown preset `{other}`, expected one of {}", PRESET_NAMES.join(", ")),
                ))
            }
        };
        Ok(p)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Flat3d => "flat3d",
            Preset::Hyperboloid { .. } => "hyperboloid",
            Preset::P1 { .. } => "p1",
            Preset::Cosymplectic { .. } => "cosymplectic",
        }
    }

    pub fn build(&self) -> Result<ExampleDescriptor> {
        match self {
            Preset::Flat3d => flat3d(),
            Preset::Hyperboloid { n } => hyperboloid(*n),
            Preset::P1 { n, f, c } => p1(*n, f.as_deref(), c.unwrap_or(1.0)),
            Preset::Cosymplectic { n, h } => cosymplectic(*n, h.as_deref()),
        }
    }
}

/// Values a preset is known to take at every point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub sectional_curvature: Option<f64>,
    pub scalar_curvature: Option<f64>,
    pub scalar_star_curvature: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExampleDescriptor {
    pub preset: Preset,
    pub structure: APCMStructure,
    /// `None` when the parameters leave the classification open.
    pub fingerprint: Option<Vec<Class>>,
    pub targets: Targets,
}

impl ExampleDescriptor {
    pub fn name(&self) -> &'static str {
        self.preset.name()
    }
}

fn names(prefix: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

/// Coordinates `x1..xn, y1..yn, z`.
pub fn xyz_coordinates(n: usize) -> Vec<String> {
    let mut c = names("x", 1..=n);
    c.extend(names("y", 1..=n));
    c.push("z".into());
    c
}

fn sum_squares(n: usize) -> String {
    (1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join(" + ")
}

fn exprs(texts: &[&str], coords: &[String]) -> Result<Vec<ComponentFn>> {
    texts.iter().map(|t| Ok(parse(t, coords)?.into())).collect()
}

pub fn flat3d() -> Result<ExampleDescriptor> {
    let coords: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let tensors = CoordinateTensors {
        g: exprs(&["-1", "0", "0", "0", "1", "0", "0", "0", "1"], &coords)?,
        phi: exprs(
            &[
                "0", "0", "cosh(2*z)",
                "0", "0", "-sinh(2*z)",
                "cosh(2*z)", "sinh(2*z)", "0",
            ],
            &coords,
        )?,
        xi: exprs(&["-sinh(2*z)", "cosh(2*z)", "0"], &coords)?,
        eta: exprs(&["sinh(2*z)", "cosh(2*z)", "0"], &coords)?,
    };
    Ok(ExampleDescriptor {
        preset: Preset::Flat3d,
        structure: APCMStructure::new(Chart::cube(coords, -1.0, 1.0)?, Source::Coordinate(tensors))?,
        fingerprint: Some(vec![Class::ParacontactMetric, Class::ParaCr]),
        targets: Targets {
            sectional_curvature: Some(0.0),
            scalar_curvature: Some(0.0),
            scalar_star_curvature: Some(0.0),
        },
    })
}

/// Graph `x_{2n+2} = sqrt(1 + Σ_{α≤n+1} x_α² − Σ_{α>n+1} x_α²)` over the chart.
pub fn hyperboloid_graph(n: usize) -> Result<Expr> {
    let coords = names("x", 1..=2 * n + 1);
    let plus: String = (1..=n + 1).map(|i| format!(" + x{i}^2")).collect();
    let minus: String = (n + 2..=2 * n + 1).map(|i| format!(" - x{i}^2")).collect();
    Ok(parse(&format!("sqrt(1{plus}{minus})"), &coords)?)
}

pub fn hyperboloid(n: usize) -> Result<ExampleDescriptor> {
    if n < 1 {
        return Err(Error::validation("structure", "hyperboloid needs n ≥ 1"));
    }
    let graph = hyperboloid_graph(n)?;
    let coords = graph.coordinates().to_vec();
    let m = (2 * n + 1) as f64;
    Ok(ExampleDescriptor {
        preset: Preset::Hyperboloid { n },
        structure: APCMStructure::new(
            Chart::cube(coords, -0.8, 0.8)?,
            Source::Hypersurface(EmbeddedHypersurface { n, graph }),
        )?,
        fingerprint: Some(vec![
            Class::ParacontactMetric,
            Class::Normal,
            Class::ParaSasakian,
            Class::ParaCr,
        ]),
        targets: Targets {
            sectional_curvature: Some(-1.0),
            scalar_curvature: Some(-(m - 1.0) * m),
            scalar_star_curvature: Some(m - 1.0),
        },
    })
}

/// Frame-basis tensors shared by the `p1` and `cosymplectic` families:
/// `ĝ(e_α, e_{n+α}) = ĝ(e_{2n+1}, e_{2n+1}) = 1`, `φ̂ = diag(−1, +1, 0)`,
/// `ξ̂ = e_{2n+1}`, `η̂ = θ^{2n+1}`.
pub fn split_frame_tensors(n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = 2 * n + 1;
    let mut g = vec![0.0; m * m];
    let mut phi = vec![0.0; m * m];
    for a in 0..n {
        g[a * m + n + a] = 1.0;
        g[(n + a) * m + a] = 1.0;
        phi[a * m + a] = -1.0;
        phi[(n + a) * m + n + a] = 1.0;
    }
    g[m * m - 1] = 1.0;
    let mut xi = vec![0.0; m];
    xi[m - 1] = 1.0;
    (g, phi, xi.clone(), xi)
}

fn frame_with(n: usize, e: Vec<ComponentFn>) -> FrameSpec {
    let (g_hat, phi_hat, xi_hat, eta_hat) = split_frame_tensors(n);
    FrameSpec {
        e,
        g_hat,
        phi_hat,
        xi_hat,
        eta_hat,
    }
}

pub fn p1(n: usize, f: Option<&str>, c: f64) -> Result<ExampleDescriptor> {
    if n < 2 {
        return Err(Error::validation("structure", "p1 needs n ≥ 2"));
    }
    let m = 2 * n + 1;
    let coords = xyz_coordinates(n);
    let constants = BTreeMap::from([("c".to_string(), c)]);
    let f_text = f.map_or_else(|| p1_default_f(n), str::to_string);
    let f_expr = parse_with_constants(&f_text, &coords, &constants)?;
    let zero = || ComponentFn::Expr(Expr::constant(0.0, &coords));
    let one = || ComponentFn::Expr(Expr::constant(1.0, &coords));
    let mut e: Vec<ComponentFn> = (0..m * m).map(|_| zero()).collect();
    for a in 0..n {
        e[a * m + a] = one();
        // e_{n+α} = −f ∂x^α + ∂y_α − 2x^α ∂z
        e[a * m + n + a] = ComponentFn::Expr(Expr::from_node(
            crate::expr::Node::Neg(Box::new(f_expr.root().clone())),
            &coords,
        ));
        e[(n + a) * m + n + a] = one();
        e[(m - 1) * m + n + a] = parse(&format!("-2*x{}", a + 1), &coords)?.into();
    }
    e[m * m - 1] = one();
    let fingerprint = match f {
        None => Some(vec![Class::ParacontactMetric, Class::ParaCr]),
        Some(P1_NEGATIVE_F) => Some(vec![Class::ParacontactMetric]),
        Some(_) => None,
    };
    let mut bounds = vec![(-1.0, 1.0); m];
    bounds[m - 1] = (0.5, 1.5);
    Ok(ExampleDescriptor {
        preset: Preset::P1 {
            n,
            f: f.map(str::to_string),
            c: Some(c),
        },
        structure: APCMStructure::new(Chart::new(coords, bounds)?, Source::Frame(frame_with(n, e)))?,
        fingerprint,
        targets: Targets::default(),
    })
}

pub fn cosymplectic(n: usize, h: Option<&str>) -> Result<ExampleDescriptor> {
    if n < 1 {
        return Err(Error::validation("structure", "cosymplectic needs n ≥ 1"));
    }
    let m = 2 * n + 1;
    let coords = xyz_coordinates(n);
    let h_text = h.map_or_else(|| cosymplectic_default_h(n), str::to_string);
    let h_expr = parse(&h_text, &coords)?;
    if let Some(y) = (n..2 * n).find(|&i| h_expr.root().uses_var(i)) {
        return Err(Error::validation(
            "structure",
            format!("H may depend on x and z only, found `{}`", coords[y]),
        ));
    }
    let zero = || ComponentFn::Expr(Expr::constant(0.0, &coords));
    let one = || ComponentFn::Expr(Expr::constant(1.0, &coords));
    let mut e: Vec<ComponentFn> = (0..m * m).map(|_| zero()).collect();
    for a in 0..n {
        e[a * m + a] = one();
        // e_α = ∂x^α − Σ_ω F^ω_α ∂y_ω with F the Hessian of H in x
        for w in 0..n {
            e[(n + w) * m + a] = ComponentFn::SecondPartial {
                f: h_expr.clone(),
                a,
                b: w,
                coef: -1.0,
            };
        }
        e[(n + a) * m + n + a] = one();
    }
    e[m * m - 1] = one();
    Ok(ExampleDescriptor {
        preset: Preset::Cosymplectic {
            n,
            h: h.map(str::to_string),
        },
        structure: APCMStructure::new(Chart::cube(coords, -1.0, 1.0)?, Source::Frame(frame_with(n, e)))?,
        fingerprint: h.is_none().then(|| {
            vec![
                Class::AlmostParaCosymplectic,
                Class::ParaCr,
                Class::ParaKahlerLeaves,
            ]
        }),
        targets: Targets::default(),
    })
}
