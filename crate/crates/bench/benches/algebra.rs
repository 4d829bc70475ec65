use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use sympq_core::actions::builtin;
use sympq_core::homotopy::{kappa, random_equivariant_homotopy};
use sympq_core::integration::{stokes_check, CutoffFamily};
use sympq_core::poly::Layout;
use sympq_core::quotient::{quotient_basis, SamplingPolicy};
use sympq_core::random::{self, combination, rng};

fn forms(c: &mut Criterion) {
    let l = Layout::linear(6);
    let mut r = rng(1);
    let a = random::form(&mut r, l, 2, 4, 6);
    let b = random::form(&mut r, l, 2, 4, 6);
    let f = random::poly_map(&mut r, l, l, 2, 3);
    c.bench_function("wedge 2x2 on R6", |bn| bn.iter(|| black_box(&a).wedge(black_box(&b))));
    c.bench_function("d of a 2-form on R6", |bn| bn.iter(|| black_box(&a).d()));
    c.bench_function("pullback of a 2-form on R6", |bn| bn.iter(|| black_box(&a).pullback(black_box(&f))));
}

fn homotopy(c: &mut Criterion) {
    let a = builtin("cp1", 0).unwrap();
    let mut r = rng(2);
    c.bench_function("kappa on cp1", |bn| {
        bn.iter_batched(
            || {
                let h = random_equivariant_homotopy(&a, &mut r);
                let k = r.gen_range(1..=3);
                (h, random::form(&mut r, a.layout(), k, 2, 3))
            },
            |(h, g)| kappa(&h, &g),
            BatchSize::SmallInput,
        )
    });
}

fn quotient(c: &mut Criterion) {
    let a = builtin("z3-cone", 0).unwrap();
    let policy = SamplingPolicy::with_seed(3);
    c.bench_function("quotient basis z3-cone degree 1, D = 4", |bn| bn.iter(|| quotient_basis(&a, 1, 4, &policy).unwrap()));
}

fn stokes(c: &mut Criterion) {
    let a = builtin("teardrop", 0).unwrap();
    let reps: Vec<_> = quotient_basis(&a, 1, 3, &SamplingPolicy::with_seed(4)).unwrap().into_iter().flat_map(|b| b.reps).collect();
    let beta = combination(&mut rng(4), a.layout(), 1, &reps);
    let cutoff = CutoffFamily::default();
    let mut g = c.benchmark_group("stokes");
    g.sample_size(10);
    g.bench_function("teardrop, 10^4 samples", |bn| bn.iter(|| stokes_check(&a, &beta, &cutoff, 1, 100, 5).unwrap()));
    g.finish();
}

criterion_group!(benches, forms, homotopy, quotient, stokes);
criterion_main!(benches);
