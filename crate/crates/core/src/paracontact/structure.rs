use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::frame::{lie_bracket, Depth, PointFrame, TensorField11, VecField};
use crate::geometry::{Chart, Source};

use super::residual::{Residual, Terms};

/// Relative threshold below which a Gram-Schmidt remainder counts as zero.
pub const RANK_GUARD: f64 = 1e-7;

/// An almost paracontact metric structure on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct APCMStructure {
    pub chart: Chart,
    pub source: Source,
}

impl APCMStructure {
    pub fn new(chart: Chart, source: Source) -> Result<Self> {
        chart.validate()?;
        if let Source::Frame(f) = &source {
            f.validate()?;
            if f.dim() != chart.dim() {
                return Err(Error::validation("structure", "frame size does not match chart dimension"));
            }
        }
        Ok(APCMStructure { chart, source })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn point_frame(&self, p: &[f64], depth: Depth) -> Result<PointFrame> {
        PointFrame::build(&self.source, p, depth)
    }
}

/// Which eigendistribution of `φ` on `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// The projector field `½(I − ξ⊗η ± φ)` onto `D^±`, with partials.
pub fn projector(pf: &PointFrame, sign: Sign) -> TensorField11 {
    let s = sign.factor();
    let d = pf.d_projector();
    TensorField11 {
        t: (&d.t + &pf.phi * s) * 0.5,
        dt: d
            .dt
            .iter()
            .zip(&pf.dphi)
            .map(|(a, b)| (a + b * s) * 0.5)
            .collect(),
    }
}

/// Orthonormal (coordinate inner product) basis of the column space of `a`,
/// picking the largest remaining column at each step.
fn column_basis(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut cols: Vec<DVector<f64>> = a.column_iter().map(|c| c.into_owned()).collect();
    let scale = cols.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while let Some((k, norm)) = cols
        .iter()
        .enumerate()
        .map(|(k, c)| (k, c.norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if norm <= RANK_GUARD * scale {
            break;
        }
        let b = cols.swap_remove(k) / norm;
        for c in &mut cols {
            let proj = b.dot(c);
            *c -= &b * proj;
        }
        basis.push(b);
    }
    basis
}

pub type Basis = Vec<DVector<f64>>;

/// Bases of `D⁺` and `D⁻` at the point, each of exactly `n` vectors.
pub fn eigendistribution_bases(pf: &PointFrame) -> Result<(Basis, Basis)> {
    let mut out = [Sign::Plus, Sign::Minus].into_iter().map(|s| {
        let basis = column_basis(&projector(pf, s).t);
        if basis.len() != pf.n() {
            return Err(Error::RankDefect {
                sign: s.symbol(),
                rank: basis.len(),
                expected: pf.n(),
            });
        }
        Ok(basis)
    });
    let plus = out.next().unwrap()?;
    let minus = out.next().unwrap()?;
    Ok((plus, minus))
}

/// Largest component of `[u,v]` outside `D^±` over pairs of basis fields,
/// the basis being extended off the point by the projector field.
pub fn involutivity_residual(pf: &PointFrame, sign: Sign) -> Result<Residual> {
    let (plus, minus) = eigendistribution_bases(pf)?;
    let basis = match sign {
        Sign::Plus => plus,
        Sign::Minus => minus,
    };
    let p = projector(pf, sign);
    let fields: Vec<VecField> = basis.into_iter().map(|b| p.apply(&VecField::constant(b))).collect();
    let mut worst = Residual::ZERO;
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            let w = lie_bracket(&fields[a], &fields[b]);
            let pw = &p.t * &w;
            let mut t = Terms::new();
            t.add(&w);
            t.sub(&pw);
            worst = worst.max(t.finish());
        }
    }
    Ok(worst)
}

/// `N(X,Y) = φ²[X,Y] + [φX,φY] − φ([φX,Y] + [X,φY])`.
pub fn nijenhuis(pf: &PointFrame, x: &VecField, y: &VecField) -> DVector<f64> {
    nijenhuis_terms(pf, x, y).iter().fold(DVector::zeros(pf.m), |s, t| s + t)
}

pub(crate) fn nijenhuis_terms(pf: &PointFrame, x: &VecField, y: &VecField) -> [DVector<f64>; 4] {
    let phi = pf.phi_field();
    let px = phi.apply(x);
    let py = phi.apply(y);
    let phi2 = &pf.phi * &pf.phi;
    [
        phi2 * lie_bracket(x, y),
        lie_bracket(&px, &py),
        -(&pf.phi * lie_bracket(&px, y)),
        -(&pf.phi * lie_bracket(x, &py)),
    ]
}

/// `L(X,Y) = −dη(X,φY)` after projecting both arguments onto `D`.
pub fn levi_form(pf: &PointFrame, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let x = pf.project_d(x);
    let y = pf.project_d(y);
    -pf.d_eta(&x, &pf.phi(&y))
}

/// `h = ½ L_ξ φ` at the point.
pub fn h_operator(pf: &PointFrame) -> DMatrix<f64> {
    pf.h.clone()
}
