use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use moddouble::exec::Exec;
use moddouble::kernel::{square_grid, WeightSpec};
use moddouble::params::{params_from_angle, Convention};
use moddouble::qdilog::QDilog;
use moddouble::representation::inner::{
    centered_basis, default_test_pair, gram_matrix, region_center, DomainSpec, WeightedGrid, DEFAULT_SIGMA,
};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn inner_product(c: &mut Criterion) {
    let p = params_from_angle(std::f64::consts::PI / 3.0).unwrap();
    let spec = WeightSpec::discrete(p, 3, Convention::Sec3).unwrap();
    let dom = DomainSpec::strip(3, 2);
    let (f, g) = default_test_pair(DEFAULT_SIGMA, region_center(&dom, &p).unwrap()).unwrap();
    let mut group = c.benchmark_group("inner_product");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let grid = WeightedGrid::build(&dom, &spec, exec).unwrap();
                grid.inner(&f, &g, exec).unwrap()
            })
        });
    }
    group.finish();
}

fn gamma_tabulation(c: &mut Criterion) {
    let p = params_from_angle(std::f64::consts::PI / 3.0).unwrap();
    let dilog = QDilog::new(p).unwrap();
    let offset = Complex64::new(0.013, 0.029);
    let points: Vec<Complex64> = square_grid(64, 0.3).into_iter().map(|z| z + offset).collect();
    let mut group = c.benchmark_group("gamma_tabulation");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dilog.tabulate(&points, exec).unwrap())
        });
    }
    group.finish();
}

fn gram(c: &mut Criterion) {
    let p = params_from_angle(std::f64::consts::PI / 3.0).unwrap();
    let spec = WeightSpec::discrete(p, 2, Convention::Sec3).unwrap();
    let dom = DomainSpec::strip(2, 1);
    let basis = centered_basis(DEFAULT_SIGMA, region_center(&dom, &p).unwrap(), 8).unwrap();
    let mut group = c.benchmark_group("gram");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| gram_matrix(&basis, &dom, &spec, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, inner_product, gamma_tabulation, gram);
criterion_main!(benches);
