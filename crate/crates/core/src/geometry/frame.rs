use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::jet::seed_unchecked;
use crate::linalg::inverse;

use super::source::{FrameSpec, Source};
use super::tensor::{self, covariant_02, ricci_partials, Curvature};

/// Minimum `|g(X,X)g(Y,Y) − g(X,Y)²|` for a plane spanned by unit
/// coordinate-norm vectors.
pub const PLANE_GUARD: f64 = 1e-6;

/// A vector field known at one point together with its first partials:
/// `dv[(i, k)] = ∂_k v^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecField {
    pub v: DVector<f64>,
    pub dv: DMatrix<f64>,
}

impl VecField {
    /// A constant coordinate-component field.
    pub fn constant(v: DVector<f64>) -> Self {
        let m = v.len();
        VecField {
            v,
            dv: DMatrix::zeros(m, m),
        }
    }

    pub fn coordinate(m: usize, i: usize) -> Self {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        Self::constant(v)
    }

    pub fn scaled(&self, k: f64) -> Self {
        VecField {
            v: &self.v * k,
            dv: &self.dv * k,
        }
    }

    pub fn sub(&self, o: &VecField) -> Self {
        VecField {
            v: &self.v - &o.v,
            dv: &self.dv - &o.dv,
        }
    }

    pub fn add(&self, o: &VecField) -> Self {
        VecField {
            v: &self.v + &o.v,
            dv: &self.dv + &o.dv,
        }
    }
}

/// A (1,1) tensor field at one point with partials: `dt[k][(i, j)] = ∂_k T^i_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField11 {
    pub t: DMatrix<f64>,
    pub dt: Vec<DMatrix<f64>>,
}

impl TensorField11 {
    /// `TV` with its partials.
    pub fn apply(&self, x: &VecField) -> VecField {
        let m = x.v.len();
        let v = &self.t * &x.v;
        let mut dv = &self.t * &x.dv;
        for k in 0..m {
            let col = &self.dt[k] * &x.v;
            for i in 0..m {
                dv[(i, k)] += col[i];
            }
        }
        VecField { v, dv }
    }
}

/// A 1-form at one point with partials: `dw[(j, k)] = ∂_k w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    pub w: DVector<f64>,
    pub dw: DMatrix<f64>,
}

impl OneFormField {
    /// `w(X)` as a scalar function, with its gradient.
    pub fn pair(&self, x: &VecField) -> (f64, DVector<f64>) {
        let val = self.w.dot(&x.v);
        let grad = self.dw.transpose() * &x.v + x.dv.transpose() * &self.w;
        (val, grad)
    }
}

/// `[X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn lie_bracket(x: &VecField, y: &VecField) -> DVector<f64> {
    &y.dv * &x.v - &x.dv * &y.v
}

/// `(L_V T)X = [V, TX] − T[V, X]`, componentwise.
pub fn lie_derivative_11(v: &VecField, t: &TensorField11) -> DMatrix<f64> {
    let m = v.v.len();
    let vv: Vec<f64> = v.v.iter().copied().collect();
    let dv: Vec<f64> = (0..m).flat_map(|k| (0..m).map(move |i| (k, i))).map(|(k, i)| v.dv[(i, k)]).collect();
    let tt: Vec<f64> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| t.t[(i, j)]).collect();
    let mut dt = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                dt.push(t.dt[k][(i, j)]);
            }
        }
    }
    DMatrix::from_row_slice(m, m, &tensor::lie_derivative_11(m, &vv, &dv, &tt, &dt))
}

/// Exterior derivative of a 1-form, `dω_ab = ½(∂_a ω_b − ∂_b ω_a)`.
pub fn exterior_derivative_1(w: &OneFormField) -> DMatrix<f64> {
    (w.dw.transpose() - &w.dw) * 0.5
}

/// `dω(X,Y) = ½(X ω(Y) − Y ω(X) − ω([X,Y]))` evaluated on fields.
pub fn exterior_derivative_on_fields(w: &OneFormField, x: &VecField, y: &VecField) -> f64 {
    let (_, gy) = w.pair(y);
    let (_, gx) = w.pair(x);
    0.5 * (gy.dot(&x.v) - gx.dot(&y.v) - w.w.dot(&lie_bracket(x, y)))
}

/// Exterior derivative of a 2-form given its partials
/// (`dw[k][(b, c)] = ∂_k Ω_bc`); returns `dΩ_abc` at `(a*m+b)*m+c`.
pub fn exterior_derivative_2(dw: &[DMatrix<f64>]) -> Vec<f64> {
    let m = dw.len();
    let mut flat = Vec::with_capacity(m * m * m);
    for dk in dw {
        for b in 0..m {
            for c in 0..m {
                flat.push(dk[(b, c)]);
            }
        }
    }
    tensor::exterior_2form(m, &flat)
}

/// How much of the engine to evaluate at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Depth {
    /// Connection, structure covariant derivatives, curvature.
    Curvature,
    /// Additionally `∇Ric` from third derivatives (needed for the
    /// three-dimensional conformal-flatness test).
    Cotton,
}

/// Evaluated coordinate-basis geometry at one sample point.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub m: usize,
    pub raw: Curvature<f64>,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub dphi: Vec<DMatrix<f64>>,
    pub xi: DVector<f64>,
    /// `(i, k) = ∂_k ξ^i`.
    pub dxi: DMatrix<f64>,
    pub eta: DVector<f64>,
    /// `(j, k) = ∂_k η_j`.
    pub deta: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub d_eta: DMatrix<f64>,
    pub fundamental: DMatrix<f64>,
    pub ricci: DMatrix<f64>,
    pub ricci_star: DMatrix<f64>,
    /// `(∇_a Ric)_bc` at `(a*m+b)*m+c`, present at [`Depth::Cotton`].
    pub nabla_ricci: Option<Vec<f64>>,
    /// `∂_a r`, present at [`Depth::Cotton`].
    pub d_scalar: Option<Vec<f64>>,
}

fn square(m: usize, flat: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, m, flat)
}

impl PointFrame {
    pub fn build(source: &Source, p: &[f64], depth: Depth) -> Result<Self> {
        let raw = Curvature::<f64>::at(source, p)?;
        let m = p.len();
        let c = &raw.conn;
        let all_finite = c.g.iter().chain(&c.gamma).chain(&raw.riemann).all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::DegenerateMetric { det: f64::NAN });
        }
        let dphi = (0..m)
            .map(|a| square(m, &c.dphi[a * m * m..(a + 1) * m * m]))
            .collect();
        let dxi = DMatrix::from_fn(m, m, |i, k| c.dxi[k * m + i]);
        let deta = DMatrix::from_fn(m, m, |j, k| c.deta[k * m + j]);
        let (nabla_ricci, d_scalar) = if depth >= Depth::Cotton {
            let (dric, dr) = ricci_partials(source, p)?;
            (Some(covariant_02(m, &c.gamma, &raw.ricci, &dric)), Some(dr))
        } else {
            (None, None)
        };
        Ok(PointFrame {
            point: p.to_vec(),
            m,
            g: square(m, &c.g),
            ginv: square(m, &c.ginv),
            phi: square(m, &c.phi),
            dphi,
            xi: DVector::from_column_slice(&c.xi),
            dxi,
            eta: DVector::from_column_slice(&c.eta),
            deta,
            h: square(m, &c.h),
            d_eta: square(m, &c.d_eta),
            fundamental: square(m, &c.fundamental),
            ricci: square(m, &raw.ricci),
            ricci_star: square(m, &raw.ricci_star),
            nabla_ricci,
            d_scalar,
            raw,
        })
    }

    pub fn n(&self) -> usize {
        (self.m - 1) / 2
    }

    pub fn phi_field(&self) -> TensorField11 {
        TensorField11 {
            t: self.phi.clone(),
            dt: self.dphi.clone(),
        }
    }

    pub fn xi_field(&self) -> VecField {
        VecField {
            v: self.xi.clone(),
            dv: self.dxi.clone(),
        }
    }

    pub fn eta_field(&self) -> OneFormField {
        OneFormField {
            w: self.eta.clone(),
            dw: self.deta.clone(),
        }
    }

    /// The field `(I − ξ⊗η)` as a (1,1) tensor with partials.
    pub fn d_projector(&self) -> TensorField11 {
        let m = self.m;
        let t = DMatrix::identity(m, m) - &self.xi * self.eta.transpose();
        let dt = (0..m)
            .map(|k| -(self.dxi.column(k) * self.eta.transpose() + &self.xi * self.deta.column(k).transpose()))
            .collect();
        TensorField11 { t, dt }
    }

    pub fn g(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.g * y))
    }

    pub fn eta(&self, x: &DVector<f64>) -> f64 {
        self.eta.dot(x)
    }

    pub fn phi(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x
    }

    pub fn h(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.h * x
    }

    /// `X − η(X)ξ`.
    pub fn project_d(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.xi * self.eta(x)
    }

    fn nabla11(&self, flat: &[f64], x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.m;
        let mut out = DMatrix::zeros(m, m);
        for a in 0..m {
            if x[a] == 0.0 {
                continue;
            }
            out += square(m, &flat[a * m * m..(a + 1) * m * m]) * x[a];
        }
        out
    }

    /// `(∇_X φ)Y`.
    pub fn nabla_phi(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.nabla11(&self.raw.conn.nabla_phi, x) * y
    }

    /// `(∇_W h)X`.
    pub fn nabla_h(&self, w: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        self.nabla11(&self.raw.nabla_h, w) * x
    }

    /// `∇_X ξ`.
    pub fn nabla_xi(&self, x: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        DVector::from_fn(m, |i, _| (0..m).map(|a| x[a] * self.raw.conn.nabla_xi[a * m + i]).sum())
    }

    /// `(∇_X η)(Y)`.
    pub fn nabla_eta(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let m = self.m;
        let ne = &self.raw.conn.nabla_eta;
        (0..m)
            .flat_map(|a| (0..m).map(move |j| (a, j)))
            .map(|(a, j)| x[a] * ne[a * m + j] * y[j])
            .sum()
    }

    /// `R(X,Y)Z`.
    pub fn riemann(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        let r = &self.raw.riemann;
        DVector::from_fn(m, |i, _| {
            let mut s = 0.0;
            for j in 0..m {
                if z[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        s += r[((i * m + j) * m + k) * m + l] * z[j] * x[k] * y[l];
                    }
                }
            }
            s
        })
    }

    /// The Ricci operator, `g(Ric Y, Z) = Ric(Y, Z)`.
    pub fn ricci_op(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.ginv * (&self.ricci * y)
    }

    pub fn d_eta(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.d_eta * y))
    }

    /// `Φ(X,Y) = g(X, φY)`.
    pub fn fundamental(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.fundamental * y))
    }

    pub fn scalar(&self) -> f64 {
        self.raw.scalar
    }

    pub fn scalar_star(&self) -> f64 {
        self.raw.scalar_star
    }
}

/// Frame fields `e_a` at `p` with their partials.
pub fn frame_fields(frame: &FrameSpec, p: &[f64]) -> Result<Vec<VecField>> {
    let m = p.len();
    let (e, _) = frame.matrix(p)?;
    let mut partials = Vec::with_capacity(m);
    for k in 0..m {
        let (ej, _) = frame.matrix(&seed_unchecked(p, k))?;
        partials.push(ej.iter().map(|x| x.du).collect::<Vec<f64>>());
    }
    Ok((0..m)
        .map(|a| VecField {
            v: DVector::from_fn(m, |i, _| e[i * m + a]),
            dv: DMatrix::from_fn(m, m, |i, k| partials[k][i * m + a]),
        })
        .collect())
}

/// Coordinate components of `v` in the frame basis, `E⁻¹ v`.
pub fn frame_coefficients(frame: &FrameSpec, p: &[f64], v: &DVector<f64>) -> Result<DVector<f64>> {
    let m = p.len();
    let (_, einv) = frame.matrix(p)?;
    Ok(DMatrix::from_row_slice(m, m, &einv) * v)
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature(pf: &PointFrame, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let x = x / x.norm();
    let y = y / y.norm();
    let gram = pf.g(&x, &x) * pf.g(&y, &y) - pf.g(&x, &y).powi(2);
    if !(gram.abs() >= PLANE_GUARD) {
        return Err(Error::DegeneratePlane { gram });
    }
    Ok(pf.g(&pf.riemann(&x, &y, &y), &x) / gram)
}

/// Max-abs component of `R − (right side of the conformally flat
/// decomposition)`: the Weyl tensor with one index raised.
pub fn weyl_residual(pf: &PointFrame) -> f64 {
    let m = pf.m;
    let mf = m as f64;
    let ric_up = &pf.ginv * &pf.ricci; // (i, k) = g^{ia} Ric_ak
    let r = pf.scalar();
    let g = &pf.g;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let rhs = (g[(l, j)] * ric_up[(i, k)] + pf.ricci[(l, j)] * delta(i, k)
                        - g[(k, j)] * ric_up[(i, l)]
                        - pf.ricci[(k, j)] * delta(i, l))
                        / (mf - 2.0)
                        - r / ((mf - 1.0) * (mf - 2.0)) * (g[(l, j)] * delta(i, k) - g[(k, j)] * delta(i, l));
                    let lhs = pf.raw.riemann[((i * m + j) * m + k) * m + l];
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    worst
}

/// Max-abs component of
/// `(∇_a Ric)_bc − (∇_c Ric)_ba − (1/(2(m−1)))(∂_a r g_bc − ∂_c r g_ba)`.
pub fn cotton_residual(pf: &PointFrame) -> Result<f64> {
    let m = pf.m;
    let nr = pf.nabla_ricci.as_ref().ok_or(Error::NotComputed("∇Ric"))?;
    let dr = pf.d_scalar.as_ref().ok_or(Error::NotComputed("∇r"))?;
    let coef = 1.0 / (2.0 * (m as f64 - 1.0));
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let v = nr[(a * m + b) * m + c] - nr[(c * m + b) * m + a]
                    - coef * (dr[a] * pf.g[(b, c)] - dr[c] * pf.g[(b, a)]);
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Conformal-flatness obstruction: the Weyl residual for `m ≥ 4`, the
/// Cotton-type residual for `m = 3` (which needs [`Depth::Cotton`]).
pub fn conformal_flatness(pf: &PointFrame) -> Result<f64> {
    if pf.m == 3 {
        cotton_residual(pf)
    } else {
        Ok(weyl_residual(pf))
    }
}

/// Max-abs component of the Christoffel-symbol asymmetry `Γ^k_ij − Γ^k_ji`.
pub fn christoffel_asymmetry(pf: &PointFrame) -> f64 {
    let m = pf.m;
    let gm = &pf.raw.conn.gamma;
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((gm[(k * m + i) * m + j] - gm[(k * m + j) * m + i]).abs());
            }
        }
    }
    worst
}

/// Max-abs `(∇g)_aij` and the same scaled by `max(1, |∂g|, |Γ g|)`.
pub fn metric_compatibility(pf: &PointFrame) -> (f64, f64) {
    let c = &pf.raw.conn;
    let raw = c.nabla_g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let scale = c.dg.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    (raw, raw / scale)
}

/// First Bianchi identity `R^i_{jkl} + R^i_{klj} + R^i_{ljk}`, raw and scaled
/// by `max(1, |R|)`.
pub fn first_bianchi(pf: &PointFrame) -> (f64, f64) {
    let m = pf.m;
    let r = &pf.raw.riemann;
    let at = |i: usize, j: usize, k: usize, l: usize| r[((i * m + j) * m + k) * m + l];
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    worst = worst.max((at(i, j, k, l) + at(i, k, l, j) + at(i, l, j, k)).abs());
                }
            }
        }
    }
    let scale = r.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    (worst, worst / scale)
}

/// Pair antisymmetry `g(R(X,Y)Z,W) + g(R(X,Y)W,Z)` as max-abs over
/// coordinate components, scaled by `max(1, |R_lowered|)`.
pub fn riemann_pair_antisymmetry(pf: &PointFrame) -> f64 {
    let m = pf.m;
    let r = &pf.raw.riemann;
    // R_{ajkl} = g_ai R^i_{jkl}
    let mut low = vec![0.0; m * m * m * m];
    for a in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    low[((a * m + j) * m + k) * m + l] =
                        (0..m).map(|i| pf.g[(a, i)] * r[((i * m + j) * m + k) * m + l]).sum();
                }
            }
        }
    }
    let scale = low.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    worst = worst.max(
                        (low[((a * m + j) * m + k) * m + l] + low[((j * m + a) * m + k) * m + l]).abs(),
                    );
                }
            }
        }
    }
    worst / scale
}

/// Max-abs `d(dη)` component.
pub fn d_squared(pf: &PointFrame) -> f64 {
    pf.raw.dd_eta.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Max-abs `g g⁻¹ − I` component.
pub fn inverse_defect(pf: &PointFrame) -> f64 {
    (&pf.g * &pf.ginv - DMatrix::identity(pf.m, pf.m)).abs().max()
}

/// Inverse of a frame matrix as nalgebra, for callers outside the engine.
pub fn invert(m: usize, flat: &[f64]) -> Option<DMatrix<f64>> {
    inverse(flat, m).map(|(inv, _)| DMatrix::from_row_slice(m, m, &inv))
}
