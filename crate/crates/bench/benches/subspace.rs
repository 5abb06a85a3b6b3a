use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use irr_core::corpus::{build_matrix, default_stopwords, synthesize_collection};
use irr_core::evalmetrics::{cluster, ClusteringAlgorithm};
use irr_core::linalg::svd;
use irr_core::subspace::{irr, lsi, represent, EllMode, IrrConfig};
use irr_core::{SynthSpec, TermDocumentMatrix};

fn collection(dist: &[usize]) -> TermDocumentMatrix {
    let spec = SynthSpec {
        distribution: dist.to_vec(),
        ..SynthSpec::default()
    };
    let (docs, _) = synthesize_collection(&spec).expect("valid spec");
    build_matrix(&docs, &default_stopwords()).expect("nonempty vocabulary")
}

fn bench_svd(c: &mut Criterion) {
    let mut g = c.benchmark_group("svd");
    for dist in [[25, 25], [100, 100]] {
        let a = collection(&dist);
        let id = format!("{}x{}", a.n_terms(), a.n_docs());
        g.bench_with_input(BenchmarkId::from_parameter(id), &a, |b, a| b.iter(|| svd(black_box(a.matrix()))));
    }
    g.finish();
}

fn bench_subspace(c: &mut Criterion) {
    let a = collection(&[46, 4]);
    c.bench_function("lsi (46,4)", |b| b.iter(|| lsi(black_box(a.matrix()), 2)));
    c.bench_function("irr:auto (46,4)", |b| {
        let cfg = IrrConfig::auto(EllMode::Fixed(2));
        b.iter(|| irr(black_box(a.matrix()), &cfg))
    });
    c.bench_function("irr:2 (46,4)", |b| {
        let cfg = IrrConfig::fixed(2.0, 2);
        b.iter(|| irr(black_box(a.matrix()), &cfg))
    });
}

fn bench_clustering(c: &mut Criterion) {
    let a = collection(&[25, 25]);
    let basis = lsi(a.matrix(), 2).unwrap();
    let rep = represent(a.matrix(), &basis).unwrap();
    let mut g = c.benchmark_group("cluster (25,25)");
    for alg in ClusteringAlgorithm::ALL {
        g.bench_function(alg.name(), |b| b.iter(|| cluster(black_box(&rep), 2, alg)));
    }
    g.finish();
}

criterion_group!(benches, bench_svd, bench_subspace, bench_clustering);
criterion_main!(benches);
