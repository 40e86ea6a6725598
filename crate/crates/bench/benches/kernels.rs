use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stickel_bench::carlitz_tower;
use stickel_core::basefield::{enumerate_places, FqConfig};
use stickel_core::iwasawa::{char_ideal, weierstrass, LambdaSeries, PresentationMatrix};
use stickel_core::lseries::{theta_series_with, ThetaOptions, ThetaStrategy};
use stickel_core::splitting::{decompose_module, random_model_module, EndoModel};

fn places(c: &mut Criterion) {
    let cfg = FqConfig::from_q(3).unwrap();
    c.bench_function("places q=3 N=10", |b| b.iter(|| enumerate_places(black_box(&cfg), 10).unwrap()));
}

fn theta(c: &mut Criterion) {
    let (e, s) = carlitz_tower(2, 3);
    let mut g = c.benchmark_group("theta Carlitz(t,3) q=2 N=14");
    for (name, strategy) in [("euler", ThetaStrategy::EulerProduct), ("monic", ThetaStrategy::MonicSum)] {
        let opts = ThetaOptions { strategy, progress: None };
        g.bench_function(name, |b| b.iter(|| theta_series_with(black_box(&e), &s, 14, &opts).unwrap()));
    }
    g.finish();
}

fn iwasawa(c: &mut Criterion) {
    let f = LambdaSeries::new(3, 8, 20, &[6, 3, 9, 2, 7, 1, 4]).unwrap();
    c.bench_function("weierstrass p=3 k=8 N=20", |b| b.iter(|| weierstrass(black_box(&f)).unwrap()));
    let s = |c: &[i128]| LambdaSeries::new(3, 8, 20, c).unwrap();
    let m = PresentationMatrix::new(vec![vec![s(&[-3, 1, 4]), s(&[2, 5])], vec![s(&[7]), s(&[3, 0, 1])]]).unwrap();
    c.bench_function("char_ideal 2x2", |b| b.iter(|| char_ideal(black_box(&m)).unwrap()));
}

fn splitting(c: &mut Criterion) {
    let model = EndoModel::new(vec![2], 5, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mods: Vec<_> = (0..20).map(|_| random_model_module(&model, &mut rng).unwrap()).collect();
    c.bench_function("decompose 20 modules p=5", |b| {
        b.iter(|| mods.iter().all(|w| decompose_module(w, &model).unwrap().pass()))
    });
}

criterion_group!(benches, places, theta, iwasawa, splitting);
criterion_main!(benches);
