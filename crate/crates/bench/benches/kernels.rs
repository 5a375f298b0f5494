use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dstbench_core::dst::{
    asymptotic_pure, bias_estimate, reconstruct_general, reconstruct_pure, run_dst, DstExperiment,
};
use dstbench_core::numerics::hermitian_eigen;
use dstbench_core::states::random_mixed;
use dstbench_core::tomography::{gellmann_basis, reconstruct_tomo, run_tomography};
use dstbench_core::{spin_coherent, trace_distance, PointerKind, RandomSource};
use num_complex::Complex64;

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen");
    for d in [2usize, 4, 10] {
        let rho = random_mixed(d, d, &mut RandomSource::new(d as u64)).unwrap();
        let sigma = random_mixed(d, 1, &mut RandomSource::new(100 + d as u64)).unwrap();
        group.bench_with_input(BenchmarkId::new("hermitian_eigen", d), &rho, |b, r| {
            b.iter(|| hermitian_eigen(black_box(r.matrix())).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("trace_distance", d), &(rho, sigma), |b, (r, s)| {
            b.iter(|| trace_distance(black_box(r), black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampling");
    group.sample_size(20);
    for (d, pointer) in [
        (2, PointerKind::Qubit),
        (2, PointerKind::Gaussian),
        (10, PointerKind::Qubit),
    ] {
        let exp = DstExperiment {
            state: spin_coherent(d, Complex64::new(2.0, 0.0)).unwrap().density(),
            phi: 0.1,
            pointer,
            pure_mode: false,
            postselect: 0,
            copies: 100_000,
        };
        group.bench_function(BenchmarkId::new(format!("run_dst_{pointer}"), d), |b| {
            let mut rng = RandomSource::new(1);
            b.iter(|| run_dst(&exp, &mut rng).unwrap())
        });
    }
    let basis = gellmann_basis(10).unwrap();
    let rho = spin_coherent(10, Complex64::new(2.0, 0.0)).unwrap().density();
    group.bench_function("run_tomography_d10", |b| {
        let mut rng = RandomSource::new(2);
        b.iter(|| run_tomography(&rho, &basis, 100_000, &mut rng).unwrap())
    });
    group.finish();
}

fn reconstruction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruction");
    let psi = spin_coherent(10, Complex64::new(2.0, 0.0)).unwrap();
    let exp = DstExperiment {
        state: psi.density(),
        phi: 0.1,
        pointer: PointerKind::Qubit,
        pure_mode: false,
        postselect: 0,
        copies: 100_000,
    };
    let rec = run_dst(&exp, &mut RandomSource::new(3)).unwrap();
    group.bench_function("general_d10", |b| {
        b.iter(|| reconstruct_general(black_box(&rec)).unwrap())
    });
    let pure_rec = run_dst(
        &DstExperiment {
            pure_mode: true,
            ..exp.clone()
        },
        &mut RandomSource::new(4),
    )
    .unwrap();
    group.bench_function("pure_d10", |b| {
        b.iter(|| reconstruct_pure(black_box(&pure_rec)).unwrap())
    });
    let basis = gellmann_basis(10).unwrap();
    let tomo = run_tomography(&psi.density(), &basis, 100_000, &mut RandomSource::new(5)).unwrap();
    group.bench_function("tomography_d10", |b| {
        b.iter(|| reconstruct_tomo(black_box(&tomo), &basis).unwrap())
    });
    group.bench_function("asymptotic_pure_d10", |b| {
        b.iter(|| asymptotic_pure(black_box(&psi.density()), 0.1, PointerKind::Gaussian, 0).unwrap())
    });
    group.bench_function("bias_estimate_d10", |b| {
        b.iter(|| bias_estimate(black_box(&psi), 0.1, PointerKind::Gaussian).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigen, sampling, reconstruction);
criterion_main!(benches);
