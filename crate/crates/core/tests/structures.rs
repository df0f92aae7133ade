//! Structure-level quantities on the presets: brackets of the defining
//! frames, `h`, the eigendistributions, the Levi form, and implied
//! conditions.

use nalgebra::{DMatrix, DVector};
use paracr_core::geometry::frame::{frame_fields, lie_bracket, Depth, PointFrame};
use paracr_core::geometry::{Connection, Source};
use paracr_core::paracontact::{
    curvature_identity_k1, curvature_identity_k2, eigendistribution_bases, involutivity_residual, levi_form,
    residual_suite, APCMStructure, ConditionId, ConditionId::*, Probe, Sign,
};
use paracr_core::presets::{cosymplectic, flat3d, hyperboloid, p1, P1_NEGATIVE_F};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frames(s: &APCMStructure, count: usize, seed: u64) -> Vec<PointFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p = s.chart.sample(&mut rng);
        if let Ok(pf) = s.point_frame(&p, Depth::Curvature) {
            out.push(pf);
        }
    }
    out
}

fn random_vec(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0))
}

fn probes(rng: &mut ChaCha8Rng, m: usize, count: usize) -> Vec<Probe> {
    (0..count)
        .map(|_| Probe::new(random_vec(rng, m), random_vec(rng, m), random_vec(rng, m)))
        .collect()
}

fn worst(s: &APCMStructure, id: ConditionId, points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    frames(s, points, seed)
        .iter()
        .flat_map(|pf| {
            probes(&mut rng, pf.m, 4)
                .into_iter()
                .map(|pr| residual_suite(pf, id, &pr).unwrap().scaled)
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// Frame of the `p1` family at `p`, as coordinate vectors.
fn frame_vectors(s: &APCMStructure, p: &[f64]) -> Vec<DVector<f64>> {
    let Source::Frame(f) = &s.source else { panic!("frame structure") };
    frame_fields(f, p).unwrap().into_iter().map(|v| v.v).collect()
}

/// `f = (1 + x1² + x2²)/z` and its z-derivative.
fn default_f_z(p: &[f64]) -> f64 {
    -(1.0 + p[0] * p[0] + p[1] * p[1]) / (p[4] * p[4])
}

#[test]
fn p1_bracket_with_reeb_field() {
    let s = p1(2, None, 1.0).unwrap().structure;
    let Source::Frame(f) = &s.source else { unreachable!() };
    for pf in frames(&s, 20, 1) {
        let e = frame_fields(f, &pf.point).unwrap();
        let fz = default_f_z(&pf.point);
        for a in 0..2 {
            let got = lie_bracket(&e[2 + a], &e[4]);
            let dev = (got - &e[a].v * fz).amax();
            assert!(dev <= 1e-8, "[e_(n+{a}), ξ] off by {dev:e}");
        }
    }
}

#[test]
fn p1_h_operator() {
    let s = p1(2, None, 1.0).unwrap().structure;
    for pf in frames(&s, 20, 2) {
        let e = frame_vectors(&s, &pf.point);
        let fz = default_f_z(&pf.point);
        for a in 0..2 {
            assert!(pf.h(&e[a]).amax() <= 1e-9);
            assert!((pf.h(&e[2 + a]) + &e[a] * fz).amax() <= 1e-9);
        }
        assert!((&pf.h * &pf.h).amax() <= 1e-9);
    }
}

#[test]
fn p1_contact_form_with_vanishing_f() {
    let s = p1(2, Some("0"), 1.0).unwrap().structure;
    for pf in frames(&s, 10, 3) {
        let p = &pf.point;
        let want = DVector::from_column_slice(&[0.0, 0.0, 2.0 * p[0], 2.0 * p[1], 1.0]);
        assert!((&pf.eta - want).amax() <= 1e-12);
    }
}

/// Largest distance of a vector in `a` from the span of `b`.
fn span_defect(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    let mb = DMatrix::from_columns(b);
    let q = mb.qr().q();
    a.iter()
        .map(|v| (v - &q * (q.transpose() * v)).norm() / v.norm())
        .fold(0.0, f64::max)
}

#[test]
fn eigendistributions_are_spanned_by_the_frame() {
    let cases = [p1(2, None, 1.0).unwrap().structure, cosymplectic(2, None).unwrap().structure];
    for s in cases {
        for pf in frames(&s, 10, 4) {
            let e = frame_vectors(&s, &pf.point);
            let (plus, minus) = eigendistribution_bases(&pf).unwrap();
            let (e_minus, e_plus) = (&e[0..2], &e[2..4]);
            assert!(span_defect(&plus, e_plus).max(span_defect(e_plus, &plus)) <= 1e-9);
            assert!(span_defect(&minus, e_minus).max(span_defect(e_minus, &minus)) <= 1e-9);
        }
    }
}

#[test]
fn cosymplectic_frame_brackets_and_closed_forms() {
    let s = cosymplectic(2, None).unwrap().structure;
    let Source::Frame(f) = &s.source else { unreachable!() };
    let fundamental = |p: &[f64]| Connection::<f64>::at(&s.source, p).unwrap().fundamental;
    let h = 1e-5;
    for pf in frames(&s, 50, 5) {
        let e = frame_fields(f, &pf.point).unwrap();
        assert!(lie_bracket(&e[2], &e[3]).amax() == 0.0);
        // dΦ_abc = ⅓(∂_aΦ_bc + ∂_bΦ_ca + ∂_cΦ_ab) from central differences
        let d: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let (mut a, mut b) = (pf.point.clone(), pf.point.clone());
                a[k] += h;
                b[k] -= h;
                fundamental(&a).iter().zip(fundamental(&b)).map(|(u, v)| (u - v) / (2.0 * h)).collect()
            })
            .collect();
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let v = (d[a][b * 5 + c] + d[b][c * 5 + a] + d[c][a * 5 + b]) / 3.0;
                    assert!(v.abs() <= 1e-9, "dΦ_{a}{b}{c} = {v:e}");
                }
            }
        }
        assert!(pf.d_eta.amax() <= 1e-12);
    }
}

#[test]
fn involutivity_fails_off_the_solution_set() {
    let s = p1(2, Some(P1_NEGATIVE_F), 1.0).unwrap().structure;
    let worst_plus = frames(&s, 16, 6)
        .iter()
        .map(|pf| involutivity_residual(pf, Sign::Plus).unwrap().raw)
        .fold(0.0, f64::max);
    assert!(worst_plus >= 0.1, "D⁺ residual {worst_plus}");
    let good = p1(2, None, 1.0).unwrap().structure;
    for pf in frames(&good, 16, 6) {
        for sign in [Sign::Plus, Sign::Minus] {
            assert!(involutivity_residual(&pf, sign).unwrap().scaled <= 1e-7);
        }
    }
}

fn levi_asymmetry(s: &APCMStructure, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for pf in frames(s, 16, seed) {
        for _ in 0..4 {
            let (x, y) = (random_vec(&mut rng, pf.m), random_vec(&mut rng, pf.m));
            worst = worst.max((levi_form(&pf, &x, &y) - levi_form(&pf, &y, &x)).abs());
        }
    }
    worst
}

#[test]
fn levi_form_symmetry_tracks_para_cr() {
    for s in [
        flat3d().unwrap().structure,
        hyperboloid(1).unwrap().structure,
        p1(2, None, 1.0).unwrap().structure,
        cosymplectic(1, None).unwrap().structure,
    ] {
        assert!(levi_asymmetry(&s, 7) <= 1e-8);
    }
}

#[test]
fn levi_form_stays_symmetric_on_paracontact_metric_structures() {
    // f = x1 is not para-CR, but dη = Φ gives L(X,Y) = −g(X,Y) on D for any
    // f, so the defect only shows in the second half of the para-CR pair
    let bad = p1(2, Some(P1_NEGATIVE_F), 1.0).unwrap().structure;
    assert!(levi_asymmetry(&bad, 7) <= 1e-8);
    assert!(worst(&bad, S0, 16, 7) <= 1e-8);
    assert!(worst(&bad, S1, 16, 7) >= 0.1);
}

#[test]
fn hyperboloid_levi_form_on_positive_eigendistribution() {
    // on a para-Sasakian manifold L(X,Y) = −dη(X,φY) = −g(X,φ²Y) = −g(X,Y) on D
    let s = hyperboloid(1).unwrap().structure;
    for pf in frames(&s, 16, 8) {
        let (plus, _) = eigendistribution_bases(&pf).unwrap();
        for u in &plus {
            for v in &plus {
                assert!((levi_form(&pf, u, v) + pf.g(u, v)).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn flat_structure_is_far_from_para_sasakian() {
    let s = flat3d().unwrap().structure;
    assert!(worst(&s, Sas, 16, 9) >= 0.1);
}

#[test]
fn curvature_identities_on_para_cr_paracontact_metric_presets() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for s in [flat3d().unwrap().structure, hyperboloid(2).unwrap().structure, p1(2, None, 1.0).unwrap().structure] {
        for pf in frames(&s, 16, 10) {
            let m = pf.m;
            let (w, x, y) = (random_vec(&mut rng, m), random_vec(&mut rng, m), random_vec(&mut rng, m));
            let k1 = curvature_identity_k1(&pf, &w, &x, &y);
            assert!(k1.amax() <= 1e-6, "k1 residual {:e}", k1.amax());
            assert!(curvature_identity_k2(&pf, &w, &x, &y).abs() <= 1e-6);
            assert!(curvature_identity_k2(&pf, &w, &x, &pf.xi).abs() <= 1e-6);
        }
    }
}

#[test]
fn k1_residual_is_antisymmetric_in_its_first_pair() {
    // holds even where the identity itself fails
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in [p1(2, Some(P1_NEGATIVE_F), 1.0).unwrap().structure, cosymplectic(1, None).unwrap().structure] {
        for pf in frames(&s, 8, 11) {
            let m = pf.m;
            let (w, x, y) = (random_vec(&mut rng, m), random_vec(&mut rng, m), random_vec(&mut rng, m));
            let sum = curvature_identity_k1(&pf, &w, &x, &y) + curvature_identity_k1(&pf, &x, &w, &y);
            assert!(sum.amax() <= 1e-9, "{:e}", sum.amax());
        }
    }
}

#[test]
fn presets_satisfy_the_axioms() {
    for ex in [
        flat3d().unwrap(),
        hyperboloid(1).unwrap(),
        hyperboloid(2).unwrap(),
        p1(2, None, 1.0).unwrap(),
        p1(3, None, 1.0).unwrap(),
        cosymplectic(1, None).unwrap(),
        cosymplectic(2, None).unwrap(),
    ] {
        for id in [Axioms, Compat] {
            let r = worst(&ex.structure, id, 16, 12);
            assert!(r <= 1e-9, "{} {id}: {r:e}", ex.name());
        }
    }
}

#[test]
fn implied_conditions_hold() {
    let hyp = hyperboloid(1).unwrap().structure;
    for id in [Wlasn, Thm1, HZero] {
        assert!(worst(&hyp, id, 16, 13) <= 1e-7, "hyperboloid {id}");
    }
    for s in [flat3d().unwrap().structure, p1(2, None, 1.0).unwrap().structure, hyp] {
        for id in [HProps, HRel, Lemat] {
            assert!(worst(&s, id, 16, 13) <= 1e-7, "{id}");
        }
    }
}
