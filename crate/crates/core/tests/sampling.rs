//! Shot samplers checked against the exact conditional distributions.

use dstbench_core::dst::{
    allocate, conditional_mean, gaussian_conditional, qubit_conditional, run_dst, sample_shot_gaussian,
    sample_shot_qubit, DstExperiment, Observable, PointerTally, SampleMoments, SettingSampler,
};
use dstbench_core::states::random_mixed;
use dstbench_core::{complementary_basis, DensityMatrix, Error, PointerKind, PureState, RandomSource};
use num_complex::Complex64;

const SHOTS: usize = 1_000_000;

fn psi_12() -> DensityMatrix {
    PureState::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)])
        .unwrap()
        .density()
}

/// Pointer outcomes of branch `j` plus the branch counts, from `shots` draws.
fn draw(
    rho: &DensityMatrix,
    n: usize,
    observable: Observable,
    phi: f64,
    shots: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, SettingSampler) {
    let basis = complementary_basis(rho.dim()).unwrap();
    let sampler = SettingSampler::new(rho, n, observable, phi, &basis).unwrap();
    let mut rng = RandomSource::new(seed);
    let mut by_branch = vec![Vec::new(); rho.dim()];
    for _ in 0..shots {
        let (j, v) = sampler.sample(&mut rng);
        by_branch[j].push(v);
    }
    (by_branch, sampler)
}

fn assert_within_4_sigma(got: f64, want: f64, sigma: f64, what: &str) {
    assert!(
        (got - want).abs() <= 4.0 * sigma,
        "{what}: {got} vs {want} (sigma {sigma})"
    );
}

fn assert_branch_frequencies(by_branch: &[Vec<f64>], probs: &[f64]) {
    let total: usize = by_branch.iter().map(Vec::len).sum();
    for (j, (b, &p)) in by_branch.iter().zip(probs).enumerate() {
        let f = b.len() as f64 / total as f64;
        assert_within_4_sigma(f, p, (p * (1.0 - p) / total as f64).sqrt(), &format!("p(j={j})"));
    }
}

#[test]
fn zero_coupling_gives_fair_coin() {
    let (by_branch, _) = draw(&psi_12(), 0, Observable::SigmaZ, 0.0, SHOTS, 1);
    for b in by_branch.iter().filter(|b| !b.is_empty()) {
        let m = SampleMoments::from_values(b);
        assert_within_4_sigma(m.mean, 0.0, (1.0 / b.len() as f64).sqrt(), "sigma_z mean");
    }
}

#[test]
fn zero_coupling_j_marginal_is_born_rule() {
    let mut rng = RandomSource::new(3);
    let rho = random_mixed(3, 2, &mut rng).unwrap();
    let basis = complementary_basis(3).unwrap();
    let probs: Vec<f64> = (0..3).map(|j| basis.probability(rho.matrix(), j)).collect();
    let (by_branch, _) = draw(&rho, 1, Observable::SigmaY, 0.0, SHOTS, 2);
    assert_branch_frequencies(&by_branch, &probs);
}

#[test]
fn qubit_shots_match_pointer_expectations() {
    let mut rng = RandomSource::new(4);
    let rho = random_mixed(3, 1, &mut rng).unwrap();
    let basis = complementary_basis(3).unwrap();
    let phi = 0.4;
    for observable in [Observable::SigmaY, Observable::SigmaZ] {
        let (by_branch, sampler) = draw(&rho, 2, observable, phi, SHOTS, 5);
        let weights: Vec<f64> = (0..3)
            .map(|j| qubit_conditional(&rho, 2, j, phi, &basis).unwrap().weight)
            .collect();
        assert_eq!(sampler.weights(), &weights[..]);
        assert_branch_frequencies(&by_branch, &weights);
        for (j, b) in by_branch.iter().enumerate() {
            let want = conditional_mean(&rho, 2, j, observable, phi, &basis).unwrap();
            let m = SampleMoments::from_values(b);
            let sigma = ((1.0 - want * want) / b.len() as f64).sqrt();
            assert_within_4_sigma(m.mean, want, sigma, &format!("{observable:?} j={j}"));
        }
    }
}

#[test]
fn marked_state_sigma_z_is_unbiased() {
    let rho = PureState::basis(2, 0).unwrap().density();
    let (by_branch, _) = draw(&rho, 0, Observable::SigmaZ, 0.1, SHOTS, 6);
    let all: Vec<f64> = by_branch.concat();
    let m = SampleMoments::from_values(&all);
    assert_within_4_sigma(m.mean, 0.0, (1.0 / all.len() as f64).sqrt(), "sigma_z");
}

#[test]
fn zero_coupling_position_moments() {
    let (by_branch, _) = draw(&psi_12(), 0, Observable::X, 0.0, SHOTS, 7);
    let all = by_branch.concat();
    let m = SampleMoments::from_values(&all);
    let n = all.len() as f64;
    assert_within_4_sigma(m.mean, 0.0, (0.25 / n).sqrt(), "X mean");
    // Var of the sample variance for a normal: 2σ⁴/(n-1)
    assert_within_4_sigma(m.variance, 0.25, 0.25 * (2.0 / (n - 1.0)).sqrt(), "X variance");
}

#[test]
fn zero_coupling_momentum_moments() {
    let (by_branch, _) = draw(&psi_12(), 1, Observable::P, 0.0, SHOTS, 8);
    let all = by_branch.concat();
    let m = SampleMoments::from_values(&all);
    let n = all.len() as f64;
    assert_within_4_sigma(m.mean, 0.0, (1.0 / n).sqrt(), "P mean");
    assert_within_4_sigma(m.variance, 1.0, (2.0 / (n - 1.0)).sqrt(), "P variance");
}

#[test]
fn marked_state_position_is_shifted() {
    let phi = 0.3;
    let rho = PureState::basis(3, 2).unwrap().density();
    let (by_branch, _) = draw(&rho, 2, Observable::X, phi, SHOTS, 9);
    let all = by_branch.concat();
    let m = SampleMoments::from_values(&all);
    assert_within_4_sigma(m.mean, -phi, (0.25 / all.len() as f64).sqrt(), "X mean");
}

/// `⟨x|λ|x⟩ / w` from the frame coefficients, written independently of the
/// library's component decomposition.
fn position_pdf(c: &[[Complex64; 2]; 2], phi: f64, w: f64, x: f64) -> f64 {
    let g = |s: f64| (2.0 / std::f64::consts::PI).powf(0.25) * (-(x + s) * (x + s)).exp();
    let gs = [g(0.0), g(phi)];
    let mut acc = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            acc += (c[a][b] * gs[a] * gs[b]).re;
        }
    }
    acc / w
}

/// `⟨p|λ|p⟩ / w`; the shifted packet picks up `e^{ipφ}`.
fn momentum_pdf(c: &[[Complex64; 2]; 2], phi: f64, w: f64, p: f64) -> f64 {
    let env = (-0.5 * p * p).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let ph = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, p * phi)];
    let mut acc = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            acc += (c[a][b] * ph[a] * ph[b].conj()).re;
        }
    }
    env * acc / w
}

/// Kolmogorov-Smirnov statistic of `samples` against a tabulated density.
fn ks_statistic(samples: &mut [f64], pdf: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi, steps) = (-12.0, 12.0, 200_000);
    let h = (hi - lo) / steps as f64;
    let mut cdf = Vec::with_capacity(steps + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for i in 1..=steps {
        let x = lo + i as f64 * h;
        acc += 0.5 * (pdf(x - h) + pdf(x)) * h;
        cdf.push(acc);
    }
    assert!((acc - 1.0).abs() < 1e-6, "density mass {acc}");
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let k = (((x - lo) / h) as usize).min(steps - 1);
        let t = (x - lo) / h - k as f64;
        let f = cdf[k] + t * (cdf[k + 1] - cdf[k]);
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    worst
}

/// Samples of branch `j` should follow the exact conditional density; the
/// 0.1% KS critical value is about 1.95/√n.
fn assert_branch_distribution(rho: &DensityMatrix, n: usize, phi: f64, seed: u64) {
    let basis = complementary_basis(rho.dim()).unwrap();
    for observable in [Observable::X, Observable::P] {
        let (mut by_branch, _) = draw(rho, n, observable, phi, 400_000, seed);
        for (j, samples) in by_branch.iter_mut().enumerate() {
            if samples.len() < 2000 {
                continue;
            }
            let g = gaussian_conditional(rho, n, j, phi, &basis).unwrap();
            let critical = 1.95 / (samples.len() as f64).sqrt();
            let ks = match observable {
                Observable::X => ks_statistic(samples, |x| position_pdf(&g.coeffs, phi, g.weight, x)),
                _ => ks_statistic(samples, |p| momentum_pdf(&g.coeffs, phi, g.weight, p)),
            };
            assert!(ks < critical, "{observable:?} j={j}: KS {ks} >= {critical}");
        }
    }
}

#[test]
fn gaussian_samples_follow_conditional_density() {
    let mut rng = RandomSource::new(10);
    let rho = random_mixed(3, 2, &mut rng).unwrap();
    assert_branch_distribution(&rho, 0, 0.8, 11);
    assert_branch_distribution(&psi_12(), 1, 1.2, 12);
}

#[test]
fn low_acceptance_branches_follow_conditional_density() {
    // |c_1⟩ leaves branch j = 0 with weight O(φ²) and strong cancellation
    let rho = complementary_basis(2).unwrap().state(1).unwrap().density();
    assert_branch_distribution(&rho, 0, 0.6, 13);
}

#[test]
fn gaussian_conditional_means_match() {
    let mut rng = RandomSource::new(14);
    let rho = random_mixed(2, 1, &mut rng).unwrap();
    let basis = complementary_basis(2).unwrap();
    let phi = 0.5;
    for observable in [Observable::X, Observable::P] {
        let (by_branch, _) = draw(&rho, 0, observable, phi, SHOTS, 15);
        for (j, b) in by_branch.iter().enumerate() {
            let m = SampleMoments::from_values(b);
            let want = conditional_mean(&rho, 0, j, observable, phi, &basis).unwrap();
            let sigma = (m.variance / b.len() as f64).sqrt();
            assert_within_4_sigma(m.mean, want, sigma, &format!("{observable:?} j={j}"));
        }
    }
}

#[test]
fn single_shot_helpers_check_the_observable() {
    let rho = psi_12();
    let basis = complementary_basis(2).unwrap();
    let mut rng = RandomSource::new(16);
    let (j, s) = sample_shot_qubit(&rho, 0, Observable::SigmaY, 0.1, &basis, &mut rng).unwrap();
    assert!(j < 2 && (s == 1 || s == -1));
    assert!(sample_shot_gaussian(&rho, 0, Observable::X, 0.1, &basis, &mut rng).is_ok());
    assert!(matches!(
        sample_shot_qubit(&rho, 0, Observable::X, 0.1, &basis, &mut rng),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        sample_shot_gaussian(&rho, 0, Observable::SigmaZ, 0.1, &basis, &mut rng),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn allocation_spreads_copies() {
    for copies in [4u64, 7, 1000, 1001, 99_999] {
        for settings in [4usize, 6, 20] {
            let shots: Vec<u64> = (0..settings).map(|i| allocate(copies, settings, i)).collect();
            assert_eq!(shots.iter().sum::<u64>(), copies);
            assert!(shots.iter().max().unwrap() - shots.iter().min().unwrap() <= 1);
        }
    }
}

fn experiment(pointer: PointerKind, copies: u64) -> DstExperiment {
    DstExperiment {
        state: psi_12(),
        phi: 0.1,
        pointer,
        pure_mode: true,
        postselect: 0,
        copies,
    }
}

#[test]
fn run_dst_consumes_every_copy() {
    for pointer in [PointerKind::Qubit, PointerKind::Gaussian] {
        let rec = run_dst(&experiment(pointer, 1003), &mut RandomSource::new(1)).unwrap();
        rec.validate().unwrap();
        assert_eq!(rec.settings.len(), 4);
        let total: u64 = rec.settings.iter().map(|s| s.shots).sum();
        assert_eq!(total, 1003);
        for s in &rec.settings {
            assert_eq!(s.branches.iter().map(|b| b.occurrences).sum::<u64>(), s.shots);
            for b in &s.branches {
                if let PointerTally::Signs { plus, minus } = b.tally {
                    assert_eq!(plus + minus, b.occurrences);
                }
            }
        }
        let back = dstbench_core::dst::DstCountsRecord::from_json(&rec.to_json().unwrap()).unwrap();
        assert_eq!(back, rec);
    }
}

#[test]
fn run_dst_is_seed_deterministic() {
    let exp = experiment(PointerKind::Gaussian, 5000);
    let a = run_dst(&exp, &mut RandomSource::new(42)).unwrap();
    let b = run_dst(&exp, &mut RandomSource::new(42)).unwrap();
    let c = run_dst(&exp, &mut RandomSource::new(43)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn run_dst_rejects_bad_experiments() {
    let mut rng = RandomSource::new(0);
    assert!(matches!(
        run_dst(&experiment(PointerKind::Qubit, 3), &mut rng),
        Err(Error::InsufficientCopies { copies: 3, required: 4 })
    ));
    assert!(matches!(
        run_dst(&experiment(PointerKind::None, 100), &mut rng),
        Err(Error::InvalidConfig(_))
    ));
    let mut bad = experiment(PointerKind::Qubit, 100);
    bad.postselect = 2;
    assert!(matches!(run_dst(&bad, &mut rng), Err(Error::IndexOutOfRange { .. })));
    bad.postselect = 0;
    bad.phi = f64::NAN;
    assert!(matches!(run_dst(&bad, &mut rng), Err(Error::InvalidCoupling(_))));
}
