use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ordo::orderings::handle_reduce;
use ordo::quasimorph::{rho, stable_approx};
use ordo::{Cone, Element, RhoContext};
use ordo_bench::{delta_sq_context, mixed_word, sqrt2_flag};

fn flag_sign(c: &mut Criterion) {
    let cone = sqrt2_flag();
    let g = Element::lattice(&[-1_000_003, 707_107]);
    c.bench_function("flag_sign_sqrt2", |b| b.iter(|| cone.sign(black_box(&g)).unwrap()));
}

fn dehornoy_sign(c: &mut Criterion) {
    let mut group = c.benchmark_group("dehornoy_sign");
    for len in [16usize, 64, 256] {
        let cone = Cone::dehornoy(4);
        let g = mixed_word(4, len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &g, |b, g| b.iter(|| cone.sign(black_box(g)).unwrap()));
    }
    group.finish();
}

fn handle_reduction(c: &mut Criterion) {
    let w = mixed_word(3, 60);
    let w = w.as_braid().unwrap().clone();
    c.bench_function("handle_reduce_b3_len60", |b| b.iter(|| handle_reduce(black_box(&w), 1_000_000).unwrap()));
}

fn rho_bracketing(c: &mut Criterion) {
    let ctx: RhoContext = delta_sq_context(3);
    let h = Element::braid(3, &[1, 2]).unwrap().power(90).unwrap();
    c.bench_function("rho_b3_delta_sq", |b| b.iter(|| rho(&ctx, black_box(&h)).unwrap()));
    c.bench_function("stable_b3_n300", |b| {
        let s = Element::braid(3, &[1, 2]).unwrap();
        b.iter(|| stable_approx(&ctx, black_box(&s), 300).unwrap())
    });
}

criterion_group!(benches, flag_sign, dehornoy_sign, handle_reduction, rho_bracketing);
criterion_main!(benches);
