//! Where the structure tensors of a chart come from.
//!
//! Every source evaluates the coordinate-basis tensors `(g, φ, ξ, η)` at a
//! point over any [`Scalar`], which is how the rest of the engine obtains
//! exact derivatives: evaluate at a seeded jet point and read the `du` slot.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{seed_unchecked, split, Jet, Scalar};
use crate::linalg::{inverse, matmul, matvec, transpose};

/// Minimum accepted `|det E|` for frame structures.
pub const FRAME_DET_GUARD: f64 = 1e-6;
/// Minimum accepted `|det g|`.
pub const METRIC_DET_GUARD: f64 = 1e-10;
/// Minimum accepted square-root argument for graph patches.
pub const PATCH_GUARD: f64 = 1e-6;

/// A scalar component function.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentFn {
    Expr(Expr),
    /// `coef · ∂²f/∂x^a∂x^b`, differentiated through jets at evaluation time.
    SecondPartial { f: Expr, a: usize, b: usize, coef: f64 },
}

impl ComponentFn {
    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<S> {
        match self {
            ComponentFn::Expr(e) => Ok(e.eval(p)?),
            ComponentFn::SecondPartial { f, a, b, coef } => {
                let inner = seed_unchecked(p, *b);
                let outer = seed_unchecked(&inner, *a);
                let v: Jet<Jet<S>> = f.eval(&outer)?;
                Ok(v.du.du.scale(*coef))
            }
        }
    }
}

impl From<Expr> for ComponentFn {
    fn from(e: Expr) -> Self {
        ComponentFn::Expr(e)
    }
}

/// Coordinate-basis tensors at a point. Layouts: `g[i*m+j] = g_ij`,
/// `phi[i*m+j] = φ^i_j`, `xi[i] = ξ^i`, `eta[j] = η_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Components<S> {
    pub g: Vec<S>,
    pub phi: Vec<S>,
    pub xi: Vec<S>,
    pub eta: Vec<S>,
}

impl<S: Scalar> Components<Jet<S>> {
    pub fn split(&self) -> (Components<S>, Components<S>) {
        let (g, dg) = split(&self.g);
        let (phi, dphi) = split(&self.phi);
        let (xi, dxi) = split(&self.xi);
        let (eta, deta) = split(&self.eta);
        (
            Components { g, phi, xi, eta },
            Components {
                g: dg,
                phi: dphi,
                xi: dxi,
                eta: deta,
            },
        )
    }
}

/// Structure given by coordinate-basis component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateTensors {
    pub g: Vec<ComponentFn>,
    pub phi: Vec<ComponentFn>,
    pub xi: Vec<ComponentFn>,
    pub eta: Vec<ComponentFn>,
}

/// Structure given by a frame `E` (column `a` is `e_a` in coordinates) and
/// constant frame-basis tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    /// `e[i*m+a] = (e_a)^i`.
    pub e: Vec<ComponentFn>,
    pub g_hat: Vec<f64>,
    pub phi_hat: Vec<f64>,
    pub xi_hat: Vec<f64>,
    pub eta_hat: Vec<f64>,
}

impl FrameSpec {
    pub fn dim(&self) -> usize {
        self.xi_hat.len()
    }

    /// Checks `ĝ` for symmetry and signature `(n+1, n)`.
    pub fn validate(&self) -> Result<()> {
        let m = self.dim();
        if self.e.len() != m * m
            || self.g_hat.len() != m * m
            || self.phi_hat.len() != m * m
            || self.eta_hat.len() != m
        {
            return Err(Error::validation("frame", "inconsistent block sizes"));
        }
        let gh = DMatrix::from_row_slice(m, m, &self.g_hat);
        if (&gh - gh.transpose()).abs().max() > 0.0 {
            return Err(Error::validation("frame", "g_hat is not symmetric"));
        }
        let eig = SymmetricEigen::new(gh).eigenvalues;
        let pos = eig.iter().filter(|&&l| l > 1e-12).count();
        let neg = eig.iter().filter(|&&l| l < -1e-12).count();
        let n = (m - 1) / 2;
        if pos != n + 1 || neg != n {
            return Err(Error::validation(
                "frame",
                format!("g_hat has signature ({pos}, {neg}), expected ({}, {n})", n + 1),
            ));
        }
        Ok(())
    }

    /// Frame matrix at `p`, checking `|det E| ≥ FRAME_DET_GUARD`.
    pub fn matrix<S: Scalar>(&self, p: &[S]) -> Result<(Vec<S>, Vec<S>)> {
        let m = self.dim();
        let e = self
            .e
            .iter()
            .map(|c| c.eval(p))
            .collect::<Result<Vec<S>>>()?;
        let (einv, det) = inverse(&e, m).ok_or(Error::SingularFrame { det: 0.0 })?;
        if det.value().abs() < FRAME_DET_GUARD {
            return Err(Error::SingularFrame { det: det.value() });
        }
        Ok((e, einv))
    }

    /// `φ = E φ̂ E⁻¹`, `ξ = E ξ̂`, `η = η̂ E⁻¹`, `g = E⁻ᵀ ĝ E⁻¹`.
    pub fn to_coordinates<S: Scalar>(&self, p: &[S]) -> Result<Components<S>> {
        let m = self.dim();
        let (e, einv) = self.matrix(p)?;
        let c = |v: &[f64]| v.iter().map(|&x| S::cst(x)).collect::<Vec<S>>();
        let phi = matmul(&matmul(&e, &c(&self.phi_hat), m, m, m), &einv, m, m, m);
        let xi = matvec(&e, &c(&self.xi_hat), m);
        let eta = matmul(&c(&self.eta_hat), &einv, 1, m, m);
        let einv_t = transpose(&einv, m, m);
        let g = matmul(&matmul(&einv_t, &c(&self.g_hat), m, m, m), &einv, m, m, m);
        Ok(Components { g, phi, xi, eta })
    }
}

/// The hypersurface `Σ_{α≤n+1} x_α² − Σ_{α>n+1} x_α² = −1` in
/// `R^{2n+2}` with `G = diag(+1^{n+1}, −1^{n+1})` and `J` swapping the two
/// coordinate blocks, charted as a graph over the first `2n+1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedHypersurface {
    pub n: usize,
    /// Dependent ambient coordinate `x^{2n+2}` as a function of the chart.
    pub graph: Expr,
}

/// Ambient quantities produced by [`EmbeddedHypersurface::embed`].
#[derive(Debug, Clone)]
pub struct Embedding<S> {
    pub position: Vec<S>,
    /// `tangents[i]` is `∂_i F`.
    pub tangents: Vec<Vec<S>>,
}

impl EmbeddedHypersurface {
    pub fn ambient_dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn ambient_metric(&self, a: usize) -> f64 {
        if a <= self.n {
            1.0
        } else {
            -1.0
        }
    }

    pub fn ambient_inner<S: Scalar>(&self, u: &[S], v: &[S]) -> S {
        (0..self.ambient_dim()).fold(S::zero(), |s, a| s + (u[a] * v[a]).scale(self.ambient_metric(a)))
    }

    pub fn para_complex<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        let k = self.n + 1;
        (0..2 * k).map(|a| if a < k { v[a + k] } else { v[a - k] }).collect()
    }

    pub fn embed<S: Scalar>(&self, p: &[S]) -> Result<Embedding<S>> {
        let m = 2 * self.n + 1;
        let w0 = match self.graph.eval(&p.iter().map(|s| s.value()).collect::<Vec<_>>()) {
            Ok(w) => w,
            Err(_) => return Err(Error::OutsidePatch { arg: f64::NAN }),
        };
        if w0 * w0 < PATCH_GUARD {
            return Err(Error::OutsidePatch { arg: w0 * w0 });
        }
        let mut position = p.to_vec();
        let mut tangents = Vec::with_capacity(m);
        let mut w = None;
        for i in 0..m {
            let v: Jet<S> = self.graph.eval(&seed_unchecked(p, i))?;
            w.get_or_insert(v.re);
            let mut t = vec![S::zero(); m + 1];
            t[i] = S::one();
            t[m] = v.du;
            tangents.push(t);
        }
        position.push(w.unwrap());
        Ok(Embedding { position, tangents })
    }

    /// Induced structure: `g = G|H`, `ξ = −JN`, `η = g(·, ξ)`, and `φX` the
    /// tangential part of `JX`.
    pub fn pullback<S: Scalar>(&self, p: &[S]) -> Result<Components<S>> {
        let m = 2 * self.n + 1;
        let emb = self.embed(p)?;
        let t = &emb.tangents;
        let mut g = vec![S::zero(); m * m];
        for i in 0..m {
            for j in i..m {
                let v = self.ambient_inner(&t[i], &t[j]);
                g[i * m + j] = v;
                g[j * m + i] = v;
            }
        }
        let (ginv, det) = inverse(&g, m).ok_or(Error::DegenerateMetric { det: 0.0 })?;
        if det.value().abs() < METRIC_DET_GUARD {
            return Err(Error::DegenerateMetric { det: det.value() });
        }
        let xi_amb: Vec<S> = self.para_complex(&emb.position).into_iter().map(|x| -x).collect();
        let eta: Vec<S> = t.iter().map(|ti| self.ambient_inner(ti, &xi_amb)).collect();
        let xi = matvec(&ginv, &eta, m);
        // G(T_k, J T_j)
        let jt: Vec<Vec<S>> = t.iter().map(|tj| self.para_complex(tj)).collect();
        let mut gj = vec![S::zero(); m * m];
        for k in 0..m {
            for j in 0..m {
                gj[k * m + j] = self.ambient_inner(&t[k], &jt[j]);
            }
        }
        let phi = matmul(&ginv, &gj, m, m, m);
        Ok(Components { g, phi, xi, eta })
    }

    /// Quadric residual and `G(N,N) + 1` at a chart point.
    pub fn embedding_residuals(&self, p: &[f64]) -> Result<(f64, f64)> {
        let emb = self.embed(p)?;
        let x = &emb.position;
        let quad = (0..self.ambient_dim()).map(|a| self.ambient_metric(a) * x[a] * x[a]).sum::<f64>() + 1.0;
        let nn = self.ambient_inner(x, x) + 1.0;
        Ok((quad, nn))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Coordinate(CoordinateTensors),
    Frame(FrameSpec),
    Hypersurface(EmbeddedHypersurface),
}

impl Source {
    pub fn components<S: Scalar>(&self, p: &[S]) -> Result<Components<S>> {
        let c = match self {
            Source::Coordinate(t) => {
                let ev = |v: &[ComponentFn]| v.iter().map(|c| c.eval(p)).collect::<Result<Vec<S>>>();
                Components {
                    g: ev(&t.g)?,
                    phi: ev(&t.phi)?,
                    xi: ev(&t.xi)?,
                    eta: ev(&t.eta)?,
                }
            }
            Source::Frame(f) => f.to_coordinates(p)?,
            Source::Hypersurface(h) => h.pullback(p)?,
        };
        Ok(c)
    }

    /// Values and first partials `∂_k` of the structure components.
    pub fn components_with_partials<S: Scalar>(
        &self,
        p: &[S],
    ) -> Result<(Components<S>, Vec<Components<S>>)> {
        let mut value = None;
        let mut partials = Vec::with_capacity(p.len());
        for k in 0..p.len() {
            let (v, d) = self.components::<Jet<S>>(&seed_unchecked(p, k))?.split();
            value.get_or_insert(v);
            partials.push(d);
        }
        match value {
            Some(v) => Ok((v, partials)),
            None => Ok((self.components(p)?, partials)),
        }
    }

    pub fn frame(&self) -> Option<&FrameSpec> {
        match self {
            Source::Frame(f) => Some(f),
            _ => None,
        }
    }
}
