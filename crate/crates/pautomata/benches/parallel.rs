//! Benchmarks comparing the rayon-backed entry points against the
//! sequential reference implementations.
//!
//! `cargo bench -p pautomata` runs both sides when the default `parallel`
//! feature is on; without the feature the default entry points are the
//! sequential ones and the comparison collapses.

use criterion::{criterion_group, criterion_main, Criterion};

use pautomata::closure::{group_closure, group_closure_seq};
use pautomata::minimizer::{verify_minimization, verify_minimization_seq};
use pautomata::perm::Permutation;
use pautomata::pipeline;
use pautomata::wreath::WreathElement;

/// Spine generators of the full iterated binary wreath group on 16 leaves
/// (order 2^15 = 32768): one swap per level, at the leftmost node.
fn binary_wreath_generators() -> Vec<Permutation> {
    (0..4)
        .map(|level| {
            WreathElement::build(&[2, 2, 2, 2], |path| {
                if path.len() == level && path.iter().all(|&d| d == 0) {
                    Permutation::standard_cycle(2)
                } else {
                    Permutation::identity(2)
                }
            })
            .unwrap()
            .as_leaf_permutation()
        })
        .collect()
}

fn bench_closure(c: &mut Criterion) {
    let gens = binary_wreath_generators();
    let mut group = c.benchmark_group("group_closure_32768");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let closure = group_closure_seq(&gens, 100_000);
            assert_eq!(closure.order(), 32_768);
        })
    });
    group.bench_function("default", |b| {
        b.iter(|| {
            let closure = group_closure(&gens, 100_000);
            assert_eq!(closure.order(), 32_768);
        })
    });
    group.finish();
}

fn bench_verify_minimization(c: &mut Criterion) {
    let dir = std::env::temp_dir().join(format!("pautomata-bench-{}", std::process::id()));
    let out = pipeline::run_pipeline(&pipeline::example_spec_p2(), &dir).expect("pipeline runs");
    let auto = out.automaton.automaton();
    let mut group = c.benchmark_group("verify_minimization_depth8");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let check =
                verify_minimization_seq(auto, &out.minimized, &out.embedding_data, 8).unwrap();
            assert!(check.passed());
        })
    });
    group.bench_function("default", |b| {
        b.iter(|| {
            let check = verify_minimization(auto, &out.minimized, &out.embedding_data, 8).unwrap();
            assert!(check.passed());
        })
    });
    group.finish();
    std::fs::remove_dir_all(&dir).ok();
}

criterion_group!(benches, bench_closure, bench_verify_minimization);
criterion_main!(benches);
