use criterion::{criterion_group, criterion_main, Criterion};
use mzspace::census::ms_census;
use mzspace::constructions::{block_triangular, TwoBlockFamily};
use mzspace::maximality::{certify_maximal, CertificationMode};
use mzspace::mscore::{find_idempotent, ms_by_definition, trace_zero_space, DEFAULT_BUDGET};
use mzspace::{ExactMatrix, Field};
use std::hint::black_box;

fn idempotent_scan(c: &mut Criterion) {
    let f7 = Field::prime(7).unwrap();
    let sig: Vec<_> = [1, 2, 3].iter().map(|&x| f7.from_int(x)).collect();
    let v = block_triangular(&[1, 1, 1], &sig, &f7).unwrap().subspace;
    c.bench_function("idempotent scan, 7^5 elements", |b| {
        b.iter(|| find_idempotent(black_box(&v), DEFAULT_BUDGET).unwrap())
    });
}

fn definition_checker(c: &mut Criterion) {
    let h = trace_zero_space(2, &Field::prime(2).unwrap());
    c.bench_function("definition checker, H over F_2", |b| {
        b.iter(|| ms_by_definition(black_box(&h), DEFAULT_BUDGET).unwrap())
    });
}

fn witness_engine(c: &mut Criterion) {
    let f7 = Field::prime(7).unwrap();
    let fam = TwoBlockFamily::standard(1, 1, 1, f7.one(), f7.from_int(2), &f7).unwrap();
    c.bench_function("exhaustive maximality, 57 directions", |b| {
        b.iter(|| certify_maximal(black_box(&fam), CertificationMode::Exhaustive, DEFAULT_BUDGET).unwrap())
    });
}

fn rank_factorization(c: &mut Criterion) {
    let q = Field::rationals();
    let rows: Vec<Vec<i64>> = (0..6).map(|i| (0..6).map(|j| (i * 7 + j * 3) % 11 - 5).collect()).collect();
    let a = ExactMatrix::from_ints(&q, &rows);
    c.bench_function("rank factorization, 6x6 rational", |b| b.iter(|| black_box(&a).rank_factorization()));
}

fn census(c: &mut Criterion) {
    let f3 = Field::prime(3).unwrap();
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    g.bench_function("M_2(F_3)", |b| b.iter(|| ms_census(2, black_box(&f3), false, DEFAULT_BUDGET).unwrap()));
    g.finish();
}

criterion_group!(kernels, idempotent_scan, definition_checker, witness_engine, rank_factorization, census);
criterion_main!(kernels);
