use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use indlab_core::comb::{ns_cover_number, TraceSet};
use indlab_core::cover::{naive_entropy_upper, OpenCover, Region};
use indlab_core::independence::max_independence_subset;
use indlab_core::setcover::min_set_cover;
use indlab_core::{Alphabet, GroupSpec, SetTuple, ShiftSystem};

fn set_cover(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let universe = u64::MAX >> 16;
    let items: Vec<u64> = (0..40)
        .map(|_| rng.gen::<u64>() & rng.gen::<u64>() & universe)
        .collect();
    c.bench_function("min_set_cover/48x40", |b| {
        b.iter(|| min_set_cover(black_box(&universe), &items, u64::MAX))
    });
}

fn subcover(c: &mut Criterion) {
    let sys = ShiftSystem::full(GroupSpec::free(2).unwrap(), Alphabet::Plain(2)).unwrap();
    let g = sys.group();
    let cover = OpenCover::value_partition(2, &g.identity()).unwrap();
    let mut group = c.benchmark_group("naive_entropy_upper");
    for r in 0..=1 {
        let regions = vec![Region::new(format!("ball({r})"), g.ball(r))];
        group.bench_with_input(BenchmarkId::from_parameter(r), &regions, |b, regions| {
            b.iter(|| naive_entropy_upper(&cover, &sys, regions))
        });
    }
    group.finish();
}

fn independence(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_independence_subset");
    for (name, sys) in [
        (
            "z",
            ShiftSystem::full(GroupSpec::free_abelian(1).unwrap(), Alphabet::Plain(2)).unwrap(),
        ),
        (
            "f2",
            ShiftSystem::full(GroupSpec::free(2).unwrap(), Alphabet::Plain(2)).unwrap(),
        ),
    ] {
        let g = sys.group();
        let region = g.ball(if name == "z" { 6 } else { 2 });
        let tuple = SetTuple::coordinate(2, &g.identity()).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| max_independence_subset(black_box(&region), &tuple, &sys))
        });
    }
    group.finish();
}

fn ns_cover(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut group = c.benchmark_group("ns_cover_number");
    for (k, n) in [(2u8, 3usize), (2, 4), (3, 3)] {
        let cells = (k as u32 + 1).pow(n as u32);
        let mask = (0..cells)
            .filter(|_| rng.gen_bool(0.5))
            .fold(1u128, |m, c| m | 1 << c);
        let s = TraceSet::from_mask(k, n, mask).unwrap();
        group.bench_function(format!("k{k}_n{n}"), |b| {
            b.iter(|| ns_cover_number(black_box(&s), 1 << 16, u64::MAX))
        });
    }
    group.finish();
}

criterion_group!(benches, set_cover, subcover, independence, ns_cover);
criterion_main!(benches);
