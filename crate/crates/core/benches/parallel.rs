use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zvass_core::encode::Mode;
use zvass_core::model::{Configuration, Machine, MachineClass, StateId, Transform, Vector};
use zvass_core::oracle::{bfs_with, reach_set_bounded_with};
use zvass_core::par::Parallelism;

/// Three states, two counters, a reset: wide frontiers and little overlap.
fn machine() -> Machine {
    Machine::builder("bench", MachineClass::Zvassr, 2)
        .states(["p", "q", "r"])
        .letter("a", Transform::Add(Vector(vec![3, -1])))
        .letter("b", Transform::Add(Vector(vec![-2, 5])))
        .letter("c", Transform::Add(Vector(vec![1, 1])))
        .transition("p", "a", "p")
        .transition("p", "b", "q")
        .transition("q", "c", "q")
        .transition("q", "a", "r")
        .transition("r", "b", "p")
        .transition("r", "c", "r")
        .transition("q", "r1", "p")
        .transition("r", "a", "q")
        .build()
        .unwrap()
}

fn bench(c: &mut Criterion) {
    let m = machine();
    let src = Configuration::new(StateId(1), vec![0, 0]);
    // unreachable, so the search runs to the bound
    let dst = Configuration::new(StateId(2), vec![1_000, 1_000]);
    let modes = [
        ("sequential", Parallelism::Sequential),
        ("parallel", Parallelism::Parallel),
    ];

    let mut g = c.benchmark_group("reach_set");
    g.sample_size(10);
    for (name, par) in modes {
        for len in [8, 12] {
            g.bench_with_input(BenchmarkId::new(name, len), &len, |b, &len| {
                b.iter(|| reach_set_bounded_with(&m, &src, len, par).unwrap().len())
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("bfs");
    g.sample_size(10);
    for (name, par) in modes {
        g.bench_function(name, |b| {
            b.iter(|| {
                bfs_with(&m, &src, &dst, Mode::Reach, 12, par)
                    .unwrap()
                    .explored
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
