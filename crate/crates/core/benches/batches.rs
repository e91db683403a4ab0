use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frametoric::exec::Execution;
use frametoric::frame::{complex_gaussian, Frame, NormVector, Spectrum};
use frametoric::rng::rng_from_seed;
use frametoric::spark::{spark_with, DEFAULT_SPARK_TOL};
use frametoric::synthesis::{random_frame_with, SamplerConfig};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn random_frames(c: &mut Criterion) {
    let lambda = Spectrum::new(vec![8.0 / 3.0; 3]).unwrap();
    let r = NormVector::new(vec![1.0; 8]).unwrap();
    let mut group = c.benchmark_group("random_frame_batch");
    for (name, execution) in MODES {
        let config = SamplerConfig {
            execution,
            ..SamplerConfig::default()
        };
        group.bench_function(BenchmarkId::new(name, 200), |b| {
            b.iter(|| random_frame_with(&lambda, &r, 200, 1, config).unwrap())
        });
    }
    group.finish();
}

fn spark_scan(c: &mut Criterion) {
    let f = Frame::new(complex_gaussian(&mut rng_from_seed(3), 4, 18)).unwrap();
    let mut group = c.benchmark_group("spark_4x18");
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| spark_with(&f, DEFAULT_SPARK_TOL, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, random_frames, spark_scan);
criterion_main!(benches);
