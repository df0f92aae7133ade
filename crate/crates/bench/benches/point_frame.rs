use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use paracr_core::geometry::frame::{Depth, PointFrame};
use paracr_core::paracontact::{residual_suite, ConditionId, Probe};
use paracr_core::presets::Preset;
use paracr_core::verify::spec::{resolve, SpecFile};
use paracr_core::verify::{run_body, RunFlags};

fn presets() -> Vec<(&'static str, Preset)> {
    vec![
        ("flat3d", Preset::Flat3d),
        ("hyperboloid-2", Preset::Hyperboloid { n: 2 }),
        ("p1-2", Preset::P1 { n: 2, f: None, c: None }),
        ("cosymplectic-2", Preset::Cosymplectic { n: 2, h: None }),
    ]
}

/// A point inside every preset's box.
fn interior(m: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..m).map(|i| 0.1 + 0.05 * i as f64).collect();
    p[m - 1] = 0.9;
    p
}

fn point_frames(c: &mut Criterion) {
    let mut group = c.benchmark_group("point_frame");
    for (name, preset) in presets() {
        let s = preset.build().unwrap().structure;
        let p = interior(s.dim());
        group.bench_with_input(BenchmarkId::new("curvature", name), &p, |b, p| {
            b.iter(|| PointFrame::build(&s.source, black_box(p), Depth::Curvature).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("cotton", name), &p, |b, p| {
            b.iter(|| PointFrame::build(&s.source, black_box(p), Depth::Cotton).unwrap())
        });
    }
    group.finish();
}

fn residuals(c: &mut Criterion) {
    let s = Preset::P1 { n: 2, f: None, c: None }.build().unwrap().structure;
    let pf = PointFrame::build(&s.source, &interior(5), Depth::Curvature).unwrap();
    let probe = Probe::from_slices(&[0.3, -0.2, 0.5, 0.1, -0.4], &[-0.1, 0.6, 0.2, -0.5, 0.3], &[0.2, 0.2, -0.3, 0.4, 0.1]);
    let mut group = c.benchmark_group("residual");
    for id in [ConditionId::S1, ConditionId::InvolutivityPlus, ConditionId::Lemat, ConditionId::K1] {
        group.bench_function(id.id(), |b| b.iter(|| residual_suite(black_box(&pf), id, &probe).unwrap()));
    }
    group.finish();
}

fn full_run(c: &mut Criterion) {
    let spec = resolve(SpecFile::for_preset(Preset::Hyperboloid { n: 1 })).unwrap();
    let flags = RunFlags {
        points: Some(16),
        ..Default::default()
    };
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    group.bench_function("hyperboloid-1/16-points", |b| b.iter(|| run_body(&spec, &flags).unwrap()));
    group.finish();
}

criterion_group!(benches, point_frames, residuals, full_run);
criterion_main!(benches);
