//! Coordinate geometry against finite-difference and hand-derived oracles.

use nalgebra::{DMatrix, DVector};
use paracr_core::geometry::frame::{
    conformal_flatness, lie_bracket, sectional_curvature, Depth, PointFrame, VecField,
};
use paracr_core::geometry::{Connection, Source};
use paracr_core::paracontact::APCMStructure;
use paracr_core::presets::{flat3d, hyperboloid};
use paracr_core::random::random_frame_structure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-5;

fn samples(s: &APCMStructure, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p = s.chart.sample(&mut rng);
        if s.point_frame(&p, Depth::Curvature).is_ok() {
            out.push(p);
        }
    }
    out
}

fn frames(s: &APCMStructure, count: usize, seed: u64) -> Vec<PointFrame> {
    samples(s, count, seed)
        .iter()
        .map(|p| s.point_frame(p, Depth::Curvature).unwrap())
        .collect()
}

/// Central difference of every component of `f` along coordinate `k`.
fn fd(f: &impl Fn(&[f64]) -> Vec<f64>, p: &[f64], k: usize) -> Vec<f64> {
    let (mut a, mut b) = (p.to_vec(), p.to_vec());
    a[k] += H;
    b[k] -= H;
    f(&a).iter().zip(f(&b)).map(|(u, v)| (u - v) / (2.0 * H)).collect()
}

fn metric(source: &Source) -> impl Fn(&[f64]) -> Vec<f64> + '_ {
    move |p| source.components::<f64>(p).unwrap().g
}

/// Christoffel symbols from finite differences of the metric.
fn christoffel_oracle(source: &Source, p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let g = DMatrix::from_row_slice(m, m, &metric(source)(p));
    let ginv = g.try_inverse().unwrap();
    let dg: Vec<Vec<f64>> = (0..m).map(|k| fd(&metric(source), p, k)).collect();
    let d = |k: usize, i: usize, j: usize| dg[k][i * m + j];
    let mut gamma = vec![0.0; m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                gamma[(k * m + i) * m + j] = (0..m)
                    .map(|l| 0.5 * ginv[(k, l)] * (d(i, j, l) + d(j, i, l) - d(l, i, j)))
                    .sum();
            }
        }
    }
    gamma
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

#[test]
fn hyperboloid_christoffels_match_finite_differences() {
    let s = hyperboloid(1).unwrap().structure;
    for p in samples(&s, 20, 1) {
        let conn = Connection::<f64>::at(&s.source, &p).unwrap();
        let dev = max_abs_diff(&conn.gamma, &christoffel_oracle(&s.source, &p));
        assert!(dev <= 1e-6, "Γ deviates by {dev:e} at {p:?}");
    }
}

#[test]
fn flat_metric_has_vanishing_christoffels() {
    let s = flat3d().unwrap().structure;
    for pf in frames(&s, 20, 2) {
        let m = pf.raw.conn.gamma.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(m == 0.0, "Γ component {m:e}");
    }
}

#[test]
fn random_frame_riemann_matches_differences_of_christoffels() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let s = random_frame_structure(&mut rng).unwrap();
        let gamma = |p: &[f64]| Connection::<f64>::at(&s.source, p).unwrap().gamma;
        for p in samples(&s, 4, rng.gen()) {
            let m = 3;
            let g = gamma(&p);
            let dg: Vec<Vec<f64>> = (0..m).map(|k| fd(&gamma, &p, k)).collect();
            let gm = |k: usize, i: usize, j: usize| g[(k * m + i) * m + j];
            let pf = s.point_frame(&p, Depth::Curvature).unwrap();
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            let mut want = dg[k][(i * m + l) * m + j] - dg[l][(i * m + k) * m + j];
                            for q in 0..m {
                                want += gm(i, k, q) * gm(q, l, j) - gm(i, l, q) * gm(q, k, j);
                            }
                            let got = pf.raw.riemann[((i * m + j) * m + k) * m + l];
                            assert!((got - want).abs() <= 1e-4, "R^{i}_{j}{k}{l}: {got} vs {want}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn converted_frame_metric_derivative_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = random_frame_structure(&mut rng).unwrap();
    for p in samples(&s, 20, 5) {
        let conn = Connection::<f64>::at(&s.source, &p).unwrap();
        for k in 0..3 {
            let want = fd(&metric(&s.source), &p, k);
            for (ij, w) in want.iter().enumerate() {
                let got = conn.dg[k * 9 + ij];
                assert!((got - w).abs() <= 1e-5 * w.abs().max(1.0), "∂_{k} g[{ij}]: {got} vs {w}");
            }
        }
    }
}

/// `(∇_a φ)^i_j` from finite-difference `∂φ` and `Γ`.
fn nabla_phi_oracle(source: &Source, p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let phi_of = |q: &[f64]| source.components::<f64>(q).unwrap().phi;
    let phi = phi_of(p);
    let gamma = christoffel_oracle(source, p);
    let gm = |k: usize, i: usize, j: usize| gamma[(k * m + i) * m + j];
    let mut out = vec![0.0; m * m * m];
    for a in 0..m {
        let dphi = fd(&phi_of, p, a);
        for i in 0..m {
            for j in 0..m {
                out[(a * m + i) * m + j] = dphi[i * m + j]
                    + (0..m).map(|l| gm(i, a, l) * phi[l * m + j] - gm(l, a, j) * phi[i * m + l]).sum::<f64>();
            }
        }
    }
    out
}

#[test]
fn covariant_derivative_of_phi_matches_oracle() {
    for s in [flat3d().unwrap().structure, hyperboloid(1).unwrap().structure] {
        for p in samples(&s, 10, 6) {
            let conn = Connection::<f64>::at(&s.source, &p).unwrap();
            let dev = max_abs_diff(&conn.nabla_phi, &nabla_phi_oracle(&s.source, &p));
            assert!(dev <= 1e-6, "∇φ deviates by {dev:e}");
        }
    }
}

#[test]
fn flat_d_eta_equals_fundamental_form() {
    let s = flat3d().unwrap().structure;
    let (dx, dz) = (DVector::from_column_slice(&[1.0, 0.0, 0.0]), DVector::from_column_slice(&[0.0, 0.0, 1.0]));
    for pf in frames(&s, 20, 7) {
        let want = (2.0 * pf.point[2]).cosh();
        assert!((pf.d_eta(&dz, &dx) - want).abs() <= 1e-12);
        assert!((pf.fundamental(&dz, &dx) - want).abs() <= 1e-12);
    }
}

#[test]
fn hyperboloid_nabla_xi_is_minus_phi() {
    let s = hyperboloid(2).unwrap().structure;
    for pf in frames(&s, 20, 8) {
        for i in 0..5 {
            let x = DVector::from_fn(5, |k, _| if k == i { 1.0 } else { 0.0 });
            let dev = (pf.nabla_xi(&x) + pf.phi(&x)).amax();
            assert!(dev <= 1e-7, "∇ξ + φ = {dev:e}");
        }
    }
}

#[test]
fn hyperboloid_has_constant_curvature_minus_one() {
    let s = hyperboloid(1).unwrap().structure;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut v = || DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
    for pf in frames(&s, 20, 9) {
        let (x, y, z) = (v(), v(), v());
        let want = -(&x * pf.g(&y, &z) - &y * pf.g(&x, &z));
        assert!((pf.riemann(&x, &y, &z) - want).amax() <= 1e-6);
        // k recovered from R(X,Y)Y = k(g(Y,Y)X − g(X,Y)Y) by least squares
        let basis = &x * pf.g(&y, &y) - &y * pf.g(&x, &y);
        let k = pf.riemann(&x, &y, &y).dot(&basis) / basis.dot(&basis);
        if let Ok(sec) = sectional_curvature(&pf, &x, &y) {
            assert!((sec - k).abs() <= 1e-6, "sectional {sec} vs plug-back {k}");
        }
    }
}

#[test]
fn hyperboloid_embedding_and_contact_form() {
    let s = hyperboloid(2).unwrap().structure;
    let Source::Hypersurface(hs) = &s.source else { panic!("hyperboloid is a hypersurface") };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for pf in frames(&s, 50, 10) {
        let (quadric, normal) = hs.embedding_residuals(&pf.point).unwrap();
        assert!(quadric <= 1e-10 && normal <= 1e-10, "{quadric:e} {normal:e}");
        let x = DVector::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
        let y = DVector::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
        assert!((pf.d_eta(&x, &y) - pf.g(&x, &pf.phi(&y))).abs() <= 1e-7);
    }
}

#[test]
fn constant_curvature_is_conformally_flat() {
    let s = hyperboloid(2).unwrap().structure;
    for pf in frames(&s, 10, 11) {
        let r = conformal_flatness(&pf).unwrap();
        assert!(r <= 1e-5, "conformal residual {r:e}");
    }
}

#[test]
fn flat_contractions_vanish() {
    let s = flat3d().unwrap().structure;
    for pf in frames(&s, 10, 12) {
        assert!(pf.ricci.amax() <= 1e-12 && pf.scalar().abs() <= 1e-12 && pf.scalar_star().abs() <= 1e-12);
    }
}

/// Polynomial vector field on R³ with its exact Jacobian.
struct Poly {
    a: [f64; 3],
    b: [[f64; 3]; 3],
    c: [f64; 3],
}

impl Poly {
    fn random(rng: &mut ChaCha8Rng) -> Poly {
        let mut r = || rng.gen_range(-1.0..1.0);
        Poly {
            a: [r(), r(), r()],
            b: [[r(), r(), r()], [r(), r(), r()], [r(), r(), r()]],
            c: [r(), r(), r()],
        }
    }

    /// `X^i = a_i + Σ_k b_ik p_k + c_i p_i²`.
    fn at(&self, p: &[f64]) -> DVector<f64> {
        DVector::from_fn(3, |i, _| self.a[i] + (0..3).map(|k| self.b[i][k] * p[k]).sum::<f64>() + self.c[i] * p[i] * p[i])
    }

    fn field(&self, p: &[f64]) -> VecField {
        VecField {
            v: self.at(p),
            dv: DMatrix::from_fn(3, 3, |i, k| self.b[i][k] + if i == k { 2.0 * self.c[i] * p[i] } else { 0.0 }),
        }
    }
}

#[test]
fn lie_bracket_matches_directional_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let (x, y) = (Poly::random(&mut rng), Poly::random(&mut rng));
        let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // [X,Y] = D_X Y − D_Y X with directional derivatives by differences
        let along = |f: &Poly, dir: &DVector<f64>| {
            let shift = |t: f64| -> Vec<f64> { p.iter().zip(dir.iter()).map(|(a, d)| a + t * d).collect() };
            (f.at(&shift(H)) - f.at(&shift(-H))) / (2.0 * H)
        };
        let want = along(&y, &x.at(&p)) - along(&x, &y.at(&p));
        let got = lie_bracket(&x.field(&p), &y.field(&p));
        assert!((got - want).amax() <= 1e-8);
    }
}

#[test]
fn d_eta_is_closed_on_every_preset() {
    use paracr_core::geometry::frame::d_squared;
    use paracr_core::presets::{cosymplectic, p1};
    let all = [
        flat3d().unwrap(),
        hyperboloid(1).unwrap(),
        p1(2, None, 1.0).unwrap(),
        cosymplectic(1, None).unwrap(),
    ];
    for ex in all {
        for pf in frames(&ex.structure, 10, 14) {
            assert!(d_squared(&pf) <= 1e-8, "{}: ddη = {:e}", ex.name(), d_squared(&pf));
        }
    }
}
