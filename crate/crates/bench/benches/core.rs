use bdl_bench::{julg_valette, rank_two};
use bdl_core::crossed::{element_v, verify_v_identities};
use bdl_core::module_calculus::{final_identity_check, Mutation};
use bdl_core::operator::exact_index;
use bdl_core::Limits;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn ball(c: &mut Criterion) {
    let g = rank_two();
    let mut group = c.benchmark_group("ball");
    for r in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| g.ball(black_box(r), &Limits::default()).unwrap())
        });
    }
    group.finish();
}

fn dual_element(c: &mut Criterion) {
    let g = rank_two();
    c.bench_function("v_identities", |b| b.iter(|| verify_v_identities(black_box(g))));
    c.bench_function("element_v_square", |b| {
        let v = element_v(g);
        b.iter(|| v.star().mul(black_box(&v)))
    });
}

fn exact_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("index_b");
    for r in [4, 5, 6] {
        let t = julg_valette(r);
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| exact_index(black_box(&t), r - 1).unwrap())
        });
    }
    group.finish();
}

fn final_identity(c: &mut Criterion) {
    let g = rank_two();
    let mut group = c.benchmark_group("final_identity");
    group.sample_size(10);
    for r in [3, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| final_identity_check(g, black_box(r), 2, &Mutation::None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ball, dual_element, exact_rank, final_identity);
criterion_main!(benches);
