use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ivme_bench::{inserts, mixed, replay};
use ivme_core::oracle::QuerySpec;
use ivme_core::{EnumState, EpsConfig, LwState, Path4State, RefinedState, SelfJoinState, TriangleState};

fn triangle_eps(c: &mut Criterion) {
    let mut g = c.benchmark_group("triangle_inserts");
    g.sample_size(10);
    for n in [2000, 8000] {
        let ups = inserts(QuerySpec::Triangle, n);
        g.throughput(Throughput::Elements(n as u64));
        for eps in [0.0, 0.5, 1.0] {
            g.bench_with_input(BenchmarkId::new(format!("eps{eps}"), n), &ups, |b, ups| {
                b.iter(|| replay(TriangleState::new(EpsConfig::uniform(eps).unwrap()), ups))
            });
        }
        g.bench_with_input(BenchmarkId::new("refined", n), &ups, |b, ups| {
            b.iter(|| replay(RefinedState::new(0.5).unwrap(), ups))
        });
    }
    g.finish();
}

fn other_queries(c: &mut Criterion) {
    let mut g = c.benchmark_group("mixed_streams");
    g.sample_size(10);
    let n = 5000;
    g.throughput(Throughput::Elements(n as u64));
    let tri = mixed(QuerySpec::Triangle, n);
    g.bench_function("enum", |b| b.iter(|| replay(EnumState::new(0.5).unwrap(), &tri)));
    let sj = mixed(QuerySpec::TriangleSelfJoin, n);
    g.bench_function("selfjoin", |b| b.iter(|| replay(SelfJoinState::new(0.5).unwrap(), &sj)));
    let p4 = mixed(QuerySpec::Path4, n);
    g.bench_function("path4", |b| b.iter(|| replay(Path4State::new(0.5).unwrap(), &p4)));
    let lw = mixed(QuerySpec::Lw(4), n);
    g.bench_function("lw4", |b| b.iter(|| replay(LwState::new(4, 0.5).unwrap(), &lw)));
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut st = EnumState::new(0.5).unwrap();
    for u in inserts(QuerySpec::Triangle, 8000) {
        ivme_core::Engine::on_update(&mut st, u.rel, &u.tuple, u.mult);
    }
    c.bench_function("enumerate_all_8000", |b| b.iter(|| st.enumerate().count()));
}

criterion_group!(benches, triangle_eps, other_queries, enumeration);
criterion_main!(benches);
