use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use translator_core::analysis::{pointwise, DiagnosticOptions, Surface};
use translator_core::solver::{assemble_jacobian, assemble_residual};
use translator_core::{Execution, Expression, GridField, GridSpec, TranslatorSpec};

const POLICIES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn translator() -> TranslatorSpec {
    TranslatorSpec::new(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap()
}

fn state(h: f64) -> GridField {
    let exprs = Expression::parse_list("ln(1+exp(2*x1))-x1; 0.5*x2", 2).unwrap();
    GridField::from_expressions(GridSpec::centered(2, 1.0, h).unwrap(), &exprs, Execution::Parallel).unwrap()
}

fn residual(c: &mut Criterion) {
    let mut group = c.benchmark_group("residual_assembly");
    for h in [0.05, 0.02] {
        let s = state(h);
        let t = translator();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, h), &s, |b, s| {
                b.iter(|| assemble_residual(black_box(s), &t, 1e-8, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn jacobian(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobian_assembly");
    for h in [0.05, 0.02] {
        let s = state(h);
        let t = translator();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, h), &s, |b, s| {
                b.iter(|| assemble_jacobian(black_box(s), &t, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("pointwise_geometry");
    let surface = Surface::discrete(state(0.02), None).unwrap();
    let t = translator();
    for (name, exec) in POLICIES {
        let opts = DiagnosticOptions {
            exec,
            ..DiagnosticOptions::default()
        };
        group.bench_function(name, |b| b.iter(|| pointwise(black_box(&surface), &t, &opts).unwrap()));
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = residual, jacobian, geometry
}
criterion_main!(benches);
