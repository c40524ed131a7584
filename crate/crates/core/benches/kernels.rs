//! Sequential vs data-parallel execution of the enumeration-heavy kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use codesw::analysis::{self, ChainSpec};
use codesw::code::{Direction, Graph, ParityCheckCode};
use codesw::dynamics::{ChainParams, KernelId};
use codesw::oracle::{self, Fault};
use codesw::par::Execution;
use codesw::{rng_for, worm, BitMatrix, BitVector};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn random_code(checks: usize, bits: usize) -> ParityCheckCode {
    let mut rng = rng_for(42, 0);
    let rows = (0..checks).map(|_| BitVector::random(bits, &mut rng)).collect();
    ParityCheckCode::new(BitMatrix::from_rows(rows, bits).unwrap()).unwrap()
}

fn k_table(c: &mut Criterion) {
    let code = random_code(16, 12);
    let mut group = c.benchmark_group("k_table c=16");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| oracle::k_table(black_box(&code), exec).unwrap()));
    }
    group.finish();
}

fn transition_matrix(c: &mut Criterion) {
    let code = ParityCheckCode::ising(&Graph::cycle(11).unwrap()).unwrap();
    let params = ChainParams::from_beta(0.6).unwrap();
    let mut group = c.benchmark_group("transition matrix, C11 Ising");
    group.sample_size(10);
    for kernel in [KernelId::Sw, KernelId::MetropolisRc] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(kernel.to_string(), name), &exec, |b, &exec| {
                b.iter(|| oracle::build_transition_matrix_with(kernel, &code, &params, Fault::None, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn flow_congestion(c: &mut Criterion) {
    let g = Graph::complete(4).unwrap();
    let code = ParityCheckCode::ising(&g).unwrap();
    let mut group = c.benchmark_group("flow congestion K4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| worm::flow_congestion_exact(&code, &g, Direction::Primal, 0.5, 0, exec).unwrap())
        });
    }
    group.finish();
}

fn autocorrelation(c: &mut Criterion) {
    let code = ParityCheckCode::ising(&Graph::torus(2, 4).unwrap()).unwrap();
    let spec = ChainSpec {
        code: &code,
        kernel: KernelId::Glauber,
        params: ChainParams::from_beta(0.4).unwrap(),
        worm: None,
    };
    let trace = spec.trace(200_000, 1, 0).unwrap();
    let mut group = c.benchmark_group("autocorrelation 2e5");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| analysis::autocorrelation_time(black_box(trace.primary()), exec).unwrap())
        });
    }
    group.finish();
}

fn replicas(c: &mut Criterion) {
    let code = ParityCheckCode::ising(&Graph::torus(2, 4).unwrap()).unwrap();
    let spec = ChainSpec {
        code: &code,
        kernel: KernelId::Sw,
        params: ChainParams::from_beta(0.4).unwrap(),
        worm: None,
    };
    let mut group = c.benchmark_group("SW replicas 4x2000");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| spec.replicas(2_000, 1, 4, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, k_table, transition_matrix, flow_congestion, autocorrelation, replicas);
criterion_main!(benches);
