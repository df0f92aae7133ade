use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::frame::{PointFrame, VecField};

use super::condition::ConditionId::{self, *};
use super::structure::{involutivity_residual, nijenhuis_terms, Sign};

/// Raw max-abs residual and the same divided by `max(1, largest term)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub raw: f64,
    pub scaled: f64,
}

impl Residual {
    pub const ZERO: Residual = Residual { raw: 0.0, scaled: 0.0 };

    pub fn max(self, o: Residual) -> Residual {
        Residual {
            raw: self.raw.max(o.raw),
            scaled: self.scaled.max(o.scaled),
        }
    }
}

/// Accumulates the terms of a left-minus-right expression, remembering the
/// largest component of any single term for scaling.
///
/// The first term fixes the length; later terms must match it.
#[derive(Debug, Clone)]
pub struct Terms {
    sum: Option<DVector<f64>>,
    scale: f64,
}

impl Default for Terms {
    fn default() -> Self {
        Terms { sum: None, scale: 1.0 }
    }
}

impl Terms {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, v: &DVector<f64>, sign: f64) -> &mut Self {
        self.scale = self.scale.max(v.amax());
        match &mut self.sum {
            Some(s) => s.axpy(sign, v, 1.0),
            None => self.sum = Some(v * sign),
        }
        self
    }

    pub fn add(&mut self, v: &DVector<f64>) -> &mut Self {
        self.push(v, 1.0)
    }

    pub fn sub(&mut self, v: &DVector<f64>) -> &mut Self {
        self.push(v, -1.0)
    }

    pub fn add_mat(&mut self, a: &DMatrix<f64>) -> &mut Self {
        self.add(&DVector::from_column_slice(a.as_slice()))
    }

    pub fn finish(&self) -> Residual {
        let raw = self.sum.as_ref().map_or(0.0, |s| s.amax());
        Residual {
            raw,
            scaled: raw / self.scale,
        }
    }
}

/// Scalar counterpart of [`Terms`].
#[derive(Debug, Clone, Copy)]
pub struct ScalarTerms {
    sum: f64,
    scale: f64,
}

impl Default for ScalarTerms {
    fn default() -> Self {
        ScalarTerms { sum: 0.0, scale: 1.0 }
    }
}

impl ScalarTerms {
    pub fn add(&mut self, v: f64) -> &mut Self {
        self.scale = self.scale.max(v.abs());
        self.sum += v;
        self
    }

    pub fn finish(&self) -> Residual {
        Residual {
            raw: self.sum.abs(),
            scaled: self.sum.abs() / self.scale,
        }
    }
}

/// Three probe vectors `(X, Y, W)` in coordinate components.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub w: DVector<f64>,
}

impl Probe {
    pub fn new(x: DVector<f64>, y: DVector<f64>, w: DVector<f64>) -> Self {
        Probe { x, y, w }
    }

    pub fn from_slices(x: &[f64], y: &[f64], w: &[f64]) -> Self {
        Probe::new(
            DVector::from_column_slice(x),
            DVector::from_column_slice(y),
            DVector::from_column_slice(w),
        )
    }
}

fn vec_of(f: impl FnOnce(&mut Terms)) -> Residual {
    let mut t = Terms::new();
    f(&mut t);
    t.finish()
}

/// Evaluate one condition at a point on one probe tuple.
pub fn residual_suite(pf: &PointFrame, id: ConditionId, probe: &Probe) -> Result<Residual> {
    let m = pf.m;
    if let Some(required) = id.required_dimension() {
        if required != m {
            return Err(Error::WrongDimension {
                condition: id.id(),
                required,
                dim: m,
            });
        }
    }
    let (x, y) = if id.restricted_to_d() {
        (pf.project_d(&probe.x), pf.project_d(&probe.y))
    } else {
        (probe.x.clone(), probe.y.clone())
    };
    let w = &probe.w;
    let xi = &pf.xi;
    let r = match id {
        Axioms => {
            let id_m = DMatrix::<f64>::identity(m, m);
            let a = vec_of(|t| {
                t.add_mat(&(&pf.phi * &pf.phi)).add_mat(&-id_m).add_mat(&(xi * pf.eta.transpose()));
            });
            let mut b = ScalarTerms::default();
            b.add(pf.eta(xi)).add(-1.0);
            let c = vec_of(|t| {
                t.add(&pf.phi(xi));
            });
            let d = vec_of(|t| {
                t.add(&(pf.phi.transpose() * &pf.eta));
            });
            a.max(b.finish()).max(c).max(d)
        }
        Compat => {
            let a = vec_of(|t| {
                t.add_mat(&(pf.phi.transpose() * &pf.g * &pf.phi))
                    .add_mat(&pf.g)
                    .add_mat(&-(&pf.eta * pf.eta.transpose()));
            });
            let b = vec_of(|t| {
                t.add(&pf.eta).sub(&(&pf.g * xi));
            });
            let c = vec_of(|t| {
                t.add_mat(&pf.fundamental).add_mat(&pf.fundamental.transpose());
            });
            a.max(b).max(c)
        }
        Normal => {
            let xf = VecField::constant(x.clone());
            let yf = VecField::constant(y.clone());
            let mut t = Terms::new();
            for v in nijenhuis_terms(pf, &xf, &yf) {
                t.add(&v);
            }
            t.sub(&(xi * (2.0 * pf.d_eta(&x, &y))));
            t.finish()
        }
        Pcm => {
            let half = &pf.deta * 0.5;
            let mut t = Terms::new();
            t.add_mat(&pf.fundamental).add_mat(&-half.transpose()).add_mat(&half);
            t.finish()
        }
        Apcos => {
            let half = &pf.deta * 0.5;
            let mut a = Terms::new();
            a.add_mat(&half.transpose()).add_mat(&-half);
            let c = &pf.raw.conn;
            let (mut dg_phi, mut g_dphi) = (0.0f64, 0.0f64);
            for k in 0..m {
                let dg = DMatrix::from_row_slice(m, m, &c.dg[k * m * m..(k + 1) * m * m]);
                dg_phi = dg_phi.max((dg * &pf.phi).amax());
                g_dphi = g_dphi.max((&pf.g * &pf.dphi[k]).amax());
            }
            let raw = pf.raw.d_fundamental.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let b = Residual {
                raw,
                scaled: raw / dg_phi.max(g_dphi).max(1.0),
            };
            a.finish().max(b)
        }
        S0 | S1 => {
            let proj = pf.d_projector();
            let phi = pf.phi_field();
            let xf = proj.apply(&VecField::constant(probe.x.clone()));
            let yf = proj.apply(&VecField::constant(probe.y.clone()));
            let pxf = phi.apply(&xf);
            let pyf = phi.apply(&yf);
            use crate::geometry::frame::lie_bracket as br;
            if id == S0 {
                let mut t = ScalarTerms::default();
                t.add(pf.eta(&br(&pxf, &yf))).add(pf.eta(&br(&xf, &pyf)));
                t.finish()
            } else {
                let mut t = Terms::new();
                t.add(&br(&xf, &yf))
                    .add(&br(&pxf, &pyf))
                    .sub(&pf.phi(&br(&xf, &pyf)))
                    .sub(&pf.phi(&br(&pxf, &yf)));
                t.finish()
            }
        }
        InvolutivityPlus => involutivity_residual(pf, Sign::Plus)?,
        InvolutivityMinus => involutivity_residual(pf, Sign::Minus)?,
        News00 => {
            let mut t = ScalarTerms::default();
            t.add(pf.d_eta(&x, &pf.phi(&y))).add(-pf.d_eta(&y, &pf.phi(&x)));
            t.finish()
        }
        News01 => {
            let (px, py) = (pf.phi(&x), pf.phi(&y));
            let mut t = ScalarTerms::default();
            t.add(pf.nabla_eta(&x, &py))
                .add(pf.nabla_eta(&px, &y))
                .add(-pf.nabla_eta(&y, &px))
                .add(-pf.nabla_eta(&py, &x));
            t.finish()
        }
        Thm1 => {
            let (px, py) = (pf.phi(&x), pf.phi(&y));
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&x, &y))
                .add(&pf.nabla_phi(&px, &py))
                .add(&(xi * pf.nabla_eta(&y, &px)))
                .add(&(xi * pf.nabla_eta(&py, &x)));
            t.finish()
        }
        Jw3d | Wzor1 | Wzor2 => {
            let a = pf.phi(&pf.nabla_xi(&x));
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&x, &y))
                .sub(&(xi * pf.g(&a, &y)))
                .add(&(&a * pf.eta(&y)));
            t.finish()
        }
        NormalNabla => {
            let mut t = Terms::new();
            t.add(&pf.phi(&pf.nabla_phi(&x, &y)))
                .sub(&pf.nabla_phi(&pf.phi(&x), &y))
                .add(&(xi * pf.nabla_eta(&x, &y)));
            t.finish()
        }
        Wlasn => {
            let a = vec_of(|t| {
                t.add(&pf.nabla_xi(xi));
            });
            let eta_xi = DVector::from_fn(m, |j, _| {
                let mut e = DVector::zeros(m);
                e[j] = 1.0;
                pf.nabla_eta(xi, &e)
            });
            let b = vec_of(|t| {
                t.add(&eta_xi);
            });
            let c = vec_of(|t| {
                t.add(&pf.nabla_xi(&pf.phi(&x))).sub(&pf.phi(&pf.nabla_xi(&x)));
            });
            let d = vec_of(|t| {
                t.add(&pf.nabla_phi(xi, &y));
            });
            a.max(b).max(c).max(d)
        }
        HProps => {
            let (hx, hy) = (pf.h(&x), pf.h(&y));
            let mut a = ScalarTerms::default();
            a.add(pf.g(&hx, &y)).add(-pf.g(&hy, &x));
            let b = vec_of(|t| {
                t.add(&pf.phi(&hx)).add(&pf.h(&pf.phi(&x)));
            });
            let mut c = ScalarTerms::default();
            for i in 0..m {
                c.add(pf.h[(i, i)]);
            }
            let d = vec_of(|t| {
                t.add(&pf.h(xi));
            });
            let mut e = ScalarTerms::default();
            e.add(pf.eta(&hx));
            a.finish().max(b).max(c.finish()).max(d).max(e.finish())
        }
        HRel => {
            let mut t = Terms::new();
            t.add(&pf.nabla_xi(&x))
                .add(&pf.phi(&x))
                .sub(&pf.phi(&pf.h(&x)));
            t.finish()
        }
        HZero => {
            let mut t = Terms::new();
            t.add(&pf.h(&x));
            t.finish()
        }
        Lemat => {
            let (px, py) = (pf.phi(&x), pf.phi(&y));
            let ey = pf.eta(&y);
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&px, &py))
                .sub(&pf.nabla_phi(&x, &y))
                .sub(&(xi * (2.0 * pf.g(&x, &y))))
                .add(&(&x * ey))
                .sub(&(pf.h(&x) * ey))
                .add(&(xi * (ey * pf.eta(&x))));
            t.finish()
        }
        Sas => {
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&x, &y))
                .add(&(xi * pf.g(&x, &y)))
                .sub(&(&x * pf.eta(&y)));
            t.finish()
        }
        Wzorzamk => {
            let hx = pf.h(&x);
            let ey = pf.eta(&y);
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&x, &y))
                .add(&(xi * pf.g(&x, &y)))
                .sub(&(xi * pf.g(&hx, &y)))
                .sub(&(&x * ey))
                .add(&(hx * ey));
            t.finish()
        }
        Contparacr => {
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&x, &y))
                .add(&(xi * pf.g(&x, &y)))
                .sub(&(xi * pf.g(&pf.h(&x), &y)));
            t.finish()
        }
        Dacko => {
            let a = vec_of(|t| {
                t.add(&pf.nabla_xi(xi));
            });
            let b = vec_of(|t| {
                t.add(&pf.nabla_phi(xi, &y));
            });
            let nx = pf.nabla_xi(&x);
            let c = vec_of(|t| {
                t.add(&pf.nabla_xi(&pf.phi(&x))).add(&pf.phi(&nx));
            });
            let d = vec_of(|t| {
                t.add(&pf.nabla_phi(&pf.phi(&x), &pf.phi(&y)))
                    .sub(&pf.nabla_phi(&x, &y))
                    .sub(&(pf.phi(&nx) * pf.eta(&y)));
            });
            a.max(b).max(c).max(d)
        }
        Paracrcos => {
            let a = pf.phi(&pf.nabla_xi(&x));
            let mut t = Terms::new();
            t.add(&pf.nabla_phi(&x, &y)).sub(&(xi * pf.g(&a, &y)));
            t.finish()
        }
        K1 => k1_terms(pf, w, &x, &y).finish(),
        K2 => k2_terms(pf, w, &x, &y).finish(),
    };
    Ok(r)
}

fn k1_terms(pf: &PointFrame, w: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> Terms {
    let xi = &pf.xi;
    let a = pf.nabla_h(w, x) - pf.nabla_h(x, w);
    let hw = pf.h(w) - w;
    let hx = pf.h(x) - x;
    let (phw, phx) = (pf.phi(&hw), pf.phi(&hx));
    let mut t = Terms::new();
    t.add(&pf.riemann(w, x, &pf.phi(y)))
        .sub(&pf.phi(&pf.riemann(w, x, y)))
        .sub(&(xi * pf.g(&a, y)))
        .sub(&(&phw * pf.g(&hx, y)))
        .add(&(&phx * pf.g(&hw, y)))
        .add(&(&hx * pf.g(&phw, y)))
        .sub(&(&hw * pf.g(&phx, y)))
        .add(&(&a * pf.eta(y)));
    t
}

fn k2_terms(pf: &PointFrame, w: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> ScalarTerms {
    let a = pf.nabla_h(w, x) - pf.nabla_h(x, w);
    let hw = pf.h(w) - w;
    let hx = pf.h(x) - x;
    let phhw = pf.phi(&pf.h(&pf.h(w)));
    let mut t = ScalarTerms::default();
    t.add(pf.g(&pf.riemann(w, x, &pf.phi(y)), &pf.xi))
        .add(-pf.g(&a, y))
        .add(2.0 * pf.eta(y) * pf.g(&phhw, x))
        .add(-pf.eta(x) * pf.g(&pf.phi(&hw), y))
        .add(pf.eta(w) * pf.g(&pf.phi(&hx), y));
    t
}

/// Left minus right side of the curvature identity for `(R(W,X)φ)Y` on
/// para-CR paracontact metric structures.
pub fn curvature_identity_k1(pf: &PointFrame, w: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    k1_terms(pf, w, x, y).sum.expect("k1 has terms")
}

/// Left minus right side of the identity for `g(R(W,X)φY, ξ)`.
pub fn curvature_identity_k2(pf: &PointFrame, w: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    k2_terms(pf, w, x, y).sum
}
