use criterion::{criterion_group, criterion_main, Criterion};
use gvs_core::hermite::parse_function;
use gvs_core::lebesgue::luxemburg_norm;
use gvs_core::lebesgue::DiscreteMeasure;
use gvs_core::quadrature::GaussianRule;
use gvs_core::semigroups::{Path, SemigroupQuery, DEFAULT_KERNEL_NODES};
use gvs_core::smoothness::{self, SmoothnessContext, SmoothnessParams, SpaceKind};
use gvs_core::ExponentFunction;
use std::hint::black_box;

fn luxemburg(c: &mut Criterion) {
    let f = parse_function("family:random:8:3").unwrap();
    let m = DiscreteMeasure::gaussian(&GaussianRule::new(1, 64).unwrap());
    let p = ExponentFunction::gaussian_family(2.0, 1.0).unwrap();
    c.bench_function("luxemburg gaussian p, 64 nodes", |b| {
        b.iter(|| luxemburg_norm(&m, |x| f.eval_unchecked(x), black_box(&p)).unwrap())
    });
}

fn semigroup(c: &mut Criterion) {
    let f = parse_function("expand:[(1,0.5),(3,-1),(6,0.25)]").unwrap();
    let rule = GaussianRule::new(1, DEFAULT_KERNEL_NODES).unwrap();
    let mut g = c.benchmark_group("d2 P_t f(x)");
    for (name, path) in [("expansion", Path::Expansion), ("kernel", Path::Kernel)] {
        let q = SemigroupQuery {
            t: 0.7,
            k: 2,
            path,
            ou: false,
        };
        g.bench_function(name, |b| {
            b.iter(|| q.evaluate(&f, black_box(&[0.3]), &rule).unwrap())
        });
    }
    g.finish();
}

fn seminorms(c: &mut Criterion) {
    let f = parse_function("family:random:6:7").unwrap();
    let ctx = SmoothnessContext::default();
    let sp = SmoothnessParams::new(
        0.8,
        None,
        ExponentFunction::gaussian_family(2.0, 1.0).unwrap(),
        ExponentFunction::time_family(1.5, 3.0).unwrap(),
    )
    .unwrap();
    let mut g = c.benchmark_group("seminorms");
    g.sample_size(10);
    g.bench_function("besov + triebel, fixed grid", |b| {
        b.iter(|| {
            smoothness::seminorms_fixed(
                &f,
                &sp,
                &ctx,
                &ctx.grid,
                &[SpaceKind::Besov, SpaceKind::Triebel],
            )
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, luxemburg, semigroup, seminorms);
criterion_main!(benches);
