use criterion::{black_box, criterion_group, criterion_main, Criterion};
use siegel_renorm::manifolds::{find_saddle, Curve, StableManifold};
use siegel_renorm::renorm1d::{direct_pair, solve_fixed_point, SEED_LEVEL};
use siegel_renorm::renorm2d::Tower;
use siegel_renorm::{CMp, Complex64 as C64, PrecisionScope, Scalar};

fn tower_build(c: &mut Criterion) {
    c.bench_function("tower f64 a=0.2 depth 3", |b| {
        b.iter(|| Tower::golden(black_box(C64::new(0.2, 0.0)), 3).unwrap())
    });
    let _scope = PrecisionScope::new(200);
    c.bench_function("tower 200-bit a=0.2 depth 4", |b| {
        b.iter(|| Tower::golden(black_box(CMp::c(0.2, 0.0)), 4).unwrap())
    });
}

fn fixed_point(c: &mut Criterion) {
    let seed = direct_pair(SEED_LEVEL, 128);
    let mut g = c.benchmark_group("fixed point");
    g.sample_size(10);
    g.bench_function("solve to 1e-12", |b| b.iter(|| solve_fixed_point(black_box(&seed), 1e-12, 60).unwrap()));
    g.finish();
}

fn stable_graph(c: &mut Criterion) {
    let t = Tower::golden(C64::new(0.2, 0.0), 3).unwrap();
    let sm = StableManifold::compute(&t, find_saddle(&t, 1, 2).unwrap()).unwrap();
    let y = C64::new(0.1, 0.05);
    c.bench_function("psi_1^3 value and derivative", |b| b.iter(|| sm.eval_d(black_box(&y)).unwrap()));
}

criterion_group!(benches, tower_build, fixed_point, stable_graph);
criterion_main!(benches);
