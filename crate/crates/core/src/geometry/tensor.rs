//! Componentwise tensor calculus over any [`Scalar`].
//!
//! Flat row-major layouts, derivative index first:
//!
//! | quantity | index | meaning |
//! |---|---|---|
//! | `dg` | `(k*m+i)*m+j` | `∂_k g_ij` |
//! | `gamma` | `(k*m+i)*m+j` | `Γ^k_ij` |
//! | `dphi`, `nabla_phi` | `(a*m+i)*m+j` | `∂_a φ^i_j`, `(∇_a φ)^i_j` |
//! | `dxi`, `nabla_xi` | `a*m+i` | `∂_a ξ^i`, `(∇_a ξ)^i` |
//! | `deta`, `nabla_eta` | `a*m+j` | `∂_a η_j`, `(∇_a η)_j` |
//! | `riemann` | `((i*m+j)*m+k)*m+l` | `R^i_{jkl}`, `R(∂_k,∂_l)∂_j = R^i_{jkl} ∂_i` |
//!
//! Sign and normalization conventions:
//! `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`,
//! `dω(X,Y) = ½(Xω(Y) − Yω(X) − ω([X,Y]))`, and for 2-forms
//! `dΩ(X,Y,Z) = ⅓ 𝔖(XΩ(Y,Z) − Ω([X,Y],Z))`.

use crate::error::{Error, Result};
use crate::jet::{seed_unchecked, split, Jet, Scalar};
use crate::linalg::inverse;

use super::source::{Components, Source, METRIC_DET_GUARD};

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffel<S: Scalar>(m: usize, ginv: &[S], dg: &[S]) -> Vec<S> {
    let d = |k: usize, i: usize, j: usize| dg[(k * m + i) * m + j];
    let mut lowered = vec![S::zero(); m * m * m];
    for l in 0..m {
        for i in 0..m {
            for j in i..m {
                let v = (d(i, j, l) + d(j, i, l) - d(l, i, j)).scale(0.5);
                lowered[(l * m + i) * m + j] = v;
                lowered[(l * m + j) * m + i] = v;
            }
        }
    }
    let mut gamma = vec![S::zero(); m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in i..m {
                let mut s = S::zero();
                for l in 0..m {
                    s = s + ginv[k * m + l] * lowered[(l * m + i) * m + j];
                }
                gamma[(k * m + i) * m + j] = s;
                gamma[(k * m + j) * m + i] = s;
            }
        }
    }
    gamma
}

/// `(∇_a T)^i_j = ∂_a T^i_j + Γ^i_{al} T^l_j − Γ^l_{aj} T^i_l`.
pub fn covariant_11<S: Scalar>(m: usize, gamma: &[S], t: &[S], dt: &[S]) -> Vec<S> {
    let gm = |k: usize, i: usize, j: usize| gamma[(k * m + i) * m + j];
    let mut out = dt.to_vec();
    for a in 0..m {
        for i in 0..m {
            for j in 0..m {
                let mut s = out[(a * m + i) * m + j];
                for l in 0..m {
                    s = s + gm(i, a, l) * t[l * m + j] - gm(l, a, j) * t[i * m + l];
                }
                out[(a * m + i) * m + j] = s;
            }
        }
    }
    out
}

/// `(∇_a V)^i = ∂_a V^i + Γ^i_{al} V^l`.
pub fn covariant_vector<S: Scalar>(m: usize, gamma: &[S], v: &[S], dv: &[S]) -> Vec<S> {
    let mut out = dv.to_vec();
    for a in 0..m {
        for i in 0..m {
            let mut s = out[a * m + i];
            for l in 0..m {
                s = s + gamma[(i * m + a) * m + l] * v[l];
            }
            out[a * m + i] = s;
        }
    }
    out
}

/// `(∇_a ω)_j = ∂_a ω_j − Γ^l_{aj} ω_l`.
pub fn covariant_form<S: Scalar>(m: usize, gamma: &[S], w: &[S], dw: &[S]) -> Vec<S> {
    let mut out = dw.to_vec();
    for a in 0..m {
        for j in 0..m {
            let mut s = out[a * m + j];
            for l in 0..m {
                s = s - gamma[(l * m + a) * m + j] * w[l];
            }
            out[a * m + j] = s;
        }
    }
    out
}

/// `(∇_a B)_ij = ∂_a B_ij − Γ^l_{ai} B_lj − Γ^l_{aj} B_il`.
pub fn covariant_02<S: Scalar>(m: usize, gamma: &[S], b: &[S], db: &[S]) -> Vec<S> {
    let gm = |k: usize, i: usize, j: usize| gamma[(k * m + i) * m + j];
    let mut out = db.to_vec();
    for a in 0..m {
        for i in 0..m {
            for j in 0..m {
                let mut s = out[(a * m + i) * m + j];
                for l in 0..m {
                    s = s - gm(l, a, i) * b[l * m + j] - gm(l, a, j) * b[i * m + l];
                }
                out[(a * m + i) * m + j] = s;
            }
        }
    }
    out
}

/// `(L_V T)^i_j = V^l ∂_l T^i_j − T^l_j ∂_l V^i + T^i_l ∂_j V^l`, i.e.
/// `(L_V T)X = [V, TX] − T[V, X]`.
pub fn lie_derivative_11<S: Scalar>(m: usize, v: &[S], dv: &[S], t: &[S], dt: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            let mut s = S::zero();
            for l in 0..m {
                s = s + v[l] * dt[(l * m + i) * m + j] - t[l * m + j] * dv[l * m + i]
                    + t[i * m + l] * dv[j * m + l];
            }
            out[i * m + j] = s;
        }
    }
    out
}

/// `dω_ab = ½(∂_a ω_b − ∂_b ω_a)`.
pub fn exterior_1form<S: Scalar>(m: usize, dw: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            out[a * m + b] = (dw[a * m + b] - dw[b * m + a]).scale(0.5);
        }
    }
    out
}

/// `dΩ_abc = ⅓(∂_a Ω_bc + ∂_b Ω_ca + ∂_c Ω_ab)` for a 2-form `Ω`.
pub fn exterior_2form<S: Scalar>(m: usize, dw: &[S]) -> Vec<S> {
    let d = |a: usize, b: usize, c: usize| dw[(a * m + b) * m + c];
    let mut out = vec![S::zero(); m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                out[(a * m + b) * m + c] = (d(a, b, c) + d(b, c, a) + d(c, a, b)).scale(1.0 / 3.0);
            }
        }
    }
    out
}

/// `R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{kp} Γ^p_{lj} − Γ^i_{lp} Γ^p_{kj}`.
pub fn riemann<S: Scalar>(m: usize, gamma: &[S], dgamma: &[S]) -> Vec<S> {
    let m3 = m * m * m;
    let gm = |k: usize, i: usize, j: usize| gamma[(k * m + i) * m + j];
    let dgm = |a: usize, k: usize, i: usize, j: usize| dgamma[a * m3 + (k * m + i) * m + j];
    let mut out = vec![S::zero(); m3 * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in (k + 1)..m {
                    let mut s = dgm(k, i, l, j) - dgm(l, i, k, j);
                    for p in 0..m {
                        s = s + gm(i, k, p) * gm(p, l, j) - gm(i, l, p) * gm(p, k, j);
                    }
                    out[((i * m + j) * m + k) * m + l] = s;
                    out[((i * m + j) * m + l) * m + k] = -s;
                }
            }
        }
    }
    out
}

/// `Ric_ab = R^i_{b i a}`, so that `Ric(Y,Z) = Tr{X ↦ R(X,Y)Z}`.
pub fn ricci<S: Scalar>(m: usize, riem: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            let mut s = S::zero();
            for i in 0..m {
                s = s + riem[((i * m + b) * m + i) * m + a];
            }
            out[a * m + b] = s;
        }
    }
    out
}

/// `Ric*_ab = −φ^i_p R^p_{q i a} φ^q_b`, so that
/// `Ric*(Y,Z) = Tr{X ↦ −φR(X,Y)φZ}`.
pub fn ricci_star<S: Scalar>(m: usize, riem: &[S], phi: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            let mut s = S::zero();
            for i in 0..m {
                for p in 0..m {
                    let fip = phi[i * m + p];
                    if S::ORDER == 0 && fip.value() == 0.0 {
                        continue;
                    }
                    for q in 0..m {
                        s = s + fip * riem[((p * m + q) * m + i) * m + a] * phi[q * m + b];
                    }
                }
            }
            out[a * m + b] = -s;
        }
    }
    out
}

/// `g^{ab} B_ab`.
pub fn trace_02<S: Scalar>(m: usize, ginv: &[S], b: &[S]) -> S {
    (0..m * m).fold(S::zero(), |s, k| s + ginv[k] * b[k])
}

/// First-order geometry at a point: metric, connection, structure tensors
/// and their covariant derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<S> {
    pub m: usize,
    pub g: Vec<S>,
    pub ginv: Vec<S>,
    pub dg: Vec<S>,
    pub gamma: Vec<S>,
    pub phi: Vec<S>,
    pub dphi: Vec<S>,
    pub xi: Vec<S>,
    pub dxi: Vec<S>,
    pub eta: Vec<S>,
    pub deta: Vec<S>,
    pub nabla_phi: Vec<S>,
    pub nabla_xi: Vec<S>,
    pub nabla_eta: Vec<S>,
    pub nabla_g: Vec<S>,
    /// `h = ½ L_ξ φ`.
    pub h: Vec<S>,
    /// `dη_ab`.
    pub d_eta: Vec<S>,
    /// `Φ_ab = g_ac φ^c_b`.
    pub fundamental: Vec<S>,
}

macro_rules! split_fields {
    ($src:expr, $m:expr; $($f:ident),*) => {{
        $( let $f = split(&$src.$f); )*
        (
            Connection { m: $m, $($f: $f.0),* },
            Connection { m: $m, $($f: $f.1),* },
        )
    }};
}

impl<S: Scalar> Connection<Jet<S>> {
    pub fn split(&self) -> (Connection<S>, Connection<S>) {
        split_fields!(self, self.m; g, ginv, dg, gamma, phi, dphi, xi, dxi, eta, deta,
            nabla_phi, nabla_xi, nabla_eta, nabla_g, h, d_eta, fundamental)
    }
}

fn interleave<S: Scalar>(parts: &[Vec<S>]) -> Vec<S> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

impl<S: Scalar> Connection<S> {
    pub fn at(source: &Source, p: &[S]) -> Result<Self> {
        let (c, dc) = source.components_with_partials(p)?;
        Self::from_components(c, &dc)
    }

    pub fn from_components(c: Components<S>, dc: &[Components<S>]) -> Result<Self> {
        let m = c.xi.len();
        let (ginv, det) = inverse(&c.g, m).ok_or(Error::DegenerateMetric { det: 0.0 })?;
        if det.value().abs() < METRIC_DET_GUARD || !det.value().is_finite() {
            return Err(Error::DegenerateMetric { det: det.value() });
        }
        let dg = interleave(&dc.iter().map(|d| d.g.clone()).collect::<Vec<_>>());
        let dphi = interleave(&dc.iter().map(|d| d.phi.clone()).collect::<Vec<_>>());
        let dxi = interleave(&dc.iter().map(|d| d.xi.clone()).collect::<Vec<_>>());
        let deta = interleave(&dc.iter().map(|d| d.eta.clone()).collect::<Vec<_>>());
        let gamma = christoffel(m, &ginv, &dg);
        let nabla_phi = covariant_11(m, &gamma, &c.phi, &dphi);
        let nabla_xi = covariant_vector(m, &gamma, &c.xi, &dxi);
        let nabla_eta = covariant_form(m, &gamma, &c.eta, &deta);
        let nabla_g = covariant_02(m, &gamma, &c.g, &dg);
        let h = lie_derivative_11(m, &c.xi, &dxi, &c.phi, &dphi)
            .into_iter()
            .map(|x| x.scale(0.5))
            .collect();
        let d_eta = exterior_1form(m, &deta);
        let mut fundamental = vec![S::zero(); m * m];
        for a in 0..m {
            for b in 0..m {
                fundamental[a * m + b] =
                    (0..m).fold(S::zero(), |s, k| s + c.g[a * m + k] * c.phi[k * m + b]);
            }
        }
        Ok(Connection {
            m,
            g: c.g,
            ginv,
            dg,
            gamma,
            phi: c.phi,
            dphi,
            xi: c.xi,
            dxi,
            eta: c.eta,
            deta,
            nabla_phi,
            nabla_xi,
            nabla_eta,
            nabla_g,
            h,
            d_eta,
            fundamental,
        })
    }
}

/// Second-order geometry: curvature and the covariant derivatives that
/// need second derivatives of the structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature<S> {
    pub conn: Connection<S>,
    /// `∂_a Γ^k_ij` at `a*m³ + (k*m+i)*m+j`.
    pub dgamma: Vec<S>,
    pub riemann: Vec<S>,
    pub ricci: Vec<S>,
    pub scalar: S,
    pub ricci_star: Vec<S>,
    pub scalar_star: S,
    /// `(∇_a h)^i_j`.
    pub nabla_h: Vec<S>,
    /// `(d dη)_abc`.
    pub dd_eta: Vec<S>,
    /// `(dΦ)_abc`.
    pub d_fundamental: Vec<S>,
}

impl<S: Scalar> Curvature<S> {
    pub fn at(source: &Source, p: &[S]) -> Result<Self> {
        let m = p.len();
        let mut conn = None;
        let mut parts = Vec::with_capacity(m);
        for k in 0..m {
            let (c, d) = Connection::<Jet<S>>::at(source, &seed_unchecked(p, k))?.split();
            conn.get_or_insert(c);
            parts.push(d);
        }
        let conn = conn.expect("chart dimension is at least 3");
        Ok(Self::from_parts(conn, &parts))
    }

    /// Assemble from a connection and its partials `∂_k` (one per direction).
    pub fn from_parts(conn: Connection<S>, d: &[Connection<S>]) -> Self {
        let m = conn.m;
        let dgamma = interleave(&d.iter().map(|c| c.gamma.clone()).collect::<Vec<_>>());
        let riemann = riemann(m, &conn.gamma, &dgamma);
        let ricci = ricci(m, &riemann);
        let scalar = trace_02(m, &conn.ginv, &ricci);
        let ricci_star = ricci_star(m, &riemann, &conn.phi);
        let scalar_star = trace_02(m, &conn.ginv, &ricci_star);
        let dh = interleave(&d.iter().map(|c| c.h.clone()).collect::<Vec<_>>());
        let nabla_h = covariant_11(m, &conn.gamma, &conn.h, &dh);
        let dd = interleave(&d.iter().map(|c| c.d_eta.clone()).collect::<Vec<_>>());
        let dd_eta = exterior_2form(m, &dd);
        let dphi_form = interleave(&d.iter().map(|c| c.fundamental.clone()).collect::<Vec<_>>());
        let d_fundamental = exterior_2form(m, &dphi_form);
        Curvature {
            conn,
            dgamma,
            riemann,
            ricci,
            scalar,
            ricci_star,
            scalar_star,
            nabla_h,
            dd_eta,
            d_fundamental,
        }
    }
}

/// Partials `∂_k Ric_ab` (at `k*m²+a*m+b`) and `∂_k r` at an `f64` point,
/// from third derivatives of the structure.
pub fn ricci_partials(source: &Source, p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = p.len();
    let mut dric = Vec::with_capacity(m * m * m);
    let mut dr = Vec::with_capacity(m);
    for k in 0..m {
        let c = Curvature::<Jet<f64>>::at(source, &seed_unchecked(p, k))?;
        dric.extend(c.ricci.iter().map(|x| x.du));
        dr.push(c.scalar.du);
    }
    Ok((dric, dr))
}
