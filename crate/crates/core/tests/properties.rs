use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

use qubit_majorization::bench::{
    combine_effective_state, estimate_state, noiseless_intensity, prepare_beams, BenchConfig,
    Projector,
};
use qubit_majorization::entropy::{
    entropy_sum_three, overlap_bound, pair_majorization_bound, triple_majorization_bound,
};
use qubit_majorization::majorization::{
    bound_three_obs, bound_two_obs, lorenz_curve, majorizes, mixed_bound, BoundVec,
};
use qubit_majorization::qubit::{
    binary_entropy, fidelity, make_state, measure_probs, robertson_check, shannon_entropy,
    von_neumann_entropy, DensityMatrix, Observable, SpectrumPair,
};

fn direction() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..=1.0, 0.0..TAU).prop_map(|(z, phi)| {
        let rho = (1.0 - z * z).max(0.0).sqrt();
        [rho * phi.cos(), rho * phi.sin(), z]
    })
}

fn bloch_ball() -> impl Strategy<Value = [f64; 3]> {
    (0.0f64..=1.0, direction()).prop_map(|(u, n)| {
        let r = u.cbrt();
        [r * n[0], r * n[1], r * n[2]]
    })
}

fn state() -> impl Strategy<Value = DensityMatrix> {
    bloch_ball().prop_map(|r| DensityMatrix::from_bloch(r).unwrap())
}

fn observable() -> impl Strategy<Value = Observable> {
    direction().prop_map(|n| Observable::new(n[0], n[1], n[2]).unwrap())
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_map(|v| {
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            v.iter().map(|x| x / total).collect()
        } else {
            vec![1.0 / v.len() as f64; v.len()]
        }
    })
}

/// `weights`-mixture of cyclic shifts of `v`, a doubly stochastic image of it.
fn mix_shifts(v: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = v.len();
    let total: f64 = weights.iter().sum();
    (0..n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .map(|(shift, w)| w / total * v[(i + shift) % n])
                .sum()
        })
        .collect()
}

fn conjugate(rho: &DensityMatrix, axis: &Observable, angle: f64) -> DensityMatrix {
    let i = Complex64::new(0.0, 1.0);
    let u = Matrix2::identity() * Complex64::new((angle / 2.0).cos(), 0.0)
        - axis.to_matrix() * (i * (angle / 2.0).sin());
    DensityMatrix::from_matrix(&(u * rho.to_matrix() * u.adjoint())).unwrap()
}

fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
    (a.a_hh() - b.a_hh()).abs() <= tol
        && (a.a_vv() - b.a_vv()).abs() <= tol
        && (a.a_hv() - b.a_hv()).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn stokes_round_trip(rho in state(), scale in 1e-3f64..1e3) {
        let back = rho.to_stokes(scale).unwrap().to_density().unwrap();
        prop_assert!(close(&rho, &back, 1e-12));
    }

    #[test]
    fn probabilities_ignore_stokes_scale(rho in state(), k in 1e-3f64..1e3) {
        let unit = rho.to_stokes(1.0).unwrap().to_density().unwrap();
        let scaled = rho.to_stokes(k).unwrap().to_density().unwrap();
        for o in [Observable::sigma_x(), Observable::sigma_y(), Observable::sigma_z()] {
            let (p, q) = (measure_probs(&unit, &o), measure_probs(&scaled, &o));
            prop_assert!((p.p_plus - q.p_plus).abs() <= 1e-12);
        }
    }

    #[test]
    fn real_family_is_unbiased_for_sigma_y(l in 0.0f64..=1.0, alpha in -PI..PI) {
        let p = measure_probs(&make_state(l, alpha).unwrap(), &Observable::sigma_y());
        prop_assert!((p.p_plus - 0.5).abs() <= 1e-12);
        prop_assert!((p.p_minus - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn von_neumann_entropy_ignores_alpha(l in 0.0f64..=1.0, alpha in -PI..PI) {
        let s = von_neumann_entropy(&make_state(l, alpha).unwrap());
        prop_assert!((s - binary_entropy(l)).abs() <= 1e-12);
    }

    #[test]
    fn shannon_entropy_is_permutation_invariant(
        v in prop::collection::vec(0.0f64..2.0, 1..9).prop_shuffle(),
    ) {
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(shannon_entropy(&v).unwrap(), shannon_entropy(&sorted).unwrap());
    }

    #[test]
    fn maximally_mixed_bounds_are_flat(theta in 1e-6f64..=FRAC_PI_2) {
        let half = SpectrumPair::from_weight(0.5).unwrap();
        for s in [bound_two_obs(theta).unwrap(), bound_three_obs()] {
            for x in mixed_bound(&s, &half).components() {
                prop_assert!((x - 0.5).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn bound_vectors_sum_to_observable_count(theta in 1e-6f64..=FRAC_PI_2) {
        let two: f64 = bound_two_obs(theta).unwrap().components().iter().sum();
        let three: f64 = bound_three_obs().components().iter().sum();
        prop_assert!((two - 2.0).abs() <= 1e-12);
        prop_assert!((three - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn doubly_stochastic_images_lie_under_the_curve(
        s in distribution(6),
        weights in prop::collection::vec(0.01f64..1.0, 6),
    ) {
        let p = mix_shifts(&s, &weights);
        let upper = lorenz_curve(&s).unwrap();
        let lower = lorenz_curve(&p).unwrap();
        for (u, l) in upper.partial_sums.iter().zip(&lower.partial_sums) {
            prop_assert!(*l <= u + 1e-12);
        }
        prop_assert!(majorizes(&s, &p, 1e-12).unwrap().holds);
        prop_assert!(shannon_entropy(&p).unwrap() >= shannon_entropy(&s).unwrap() - 1e-9);
    }

    #[test]
    fn schur_concavity_on_arbitrary_pairs(s in distribution(6), p in distribution(6)) {
        if majorizes(&s, &p, 0.0).unwrap().holds {
            prop_assert!(shannon_entropy(&p).unwrap() >= shannon_entropy(&s).unwrap() - 1e-9);
        }
    }

    #[test]
    fn reversal_identity(l in 0.0f64..=0.5, theta in 1e-6f64..=FRAC_PI_2) {
        let sp = SpectrumPair::from_weight(l).unwrap();
        for s in [bound_two_obs(theta).unwrap(), bound_three_obs()] {
            let forward = mixed_bound(&s, &sp);
            let n = s.len();
            let c = s.components();
            let reversed: Vec<f64> =
                (0..n).map(|k| sp.lambda1 * c[k] + sp.lambda2 * c[n - 1 - k]).collect();
            let reversed = BoundVec::new(reversed).unwrap();
            prop_assert_eq!(
                shannon_entropy(forward.components()).unwrap(),
                shannon_entropy(reversed.components()).unwrap()
            );
        }
    }

    #[test]
    fn pair_bounds_are_unitarily_invariant(
        rho in state(),
        axis in observable(),
        angle in 0.0..TAU,
        theta in 1e-3f64..=FRAC_PI_2,
    ) {
        let moved = conjugate(&rho, &axis, angle);
        prop_assert!((overlap_bound(&rho, theta).unwrap() - overlap_bound(&moved, theta).unwrap()).abs() <= 1e-12);
        prop_assert!(
            (pair_majorization_bound(&rho, theta).unwrap()
                - pair_majorization_bound(&moved, theta).unwrap())
            .abs()
                <= 1e-12
        );
    }

    #[test]
    fn zero_noise_bench_reproduces_the_mixture(l in 0.0f64..=1.0, alpha in -PI..PI, total in 0.1f64..10.0) {
        let cfg = BenchConfig {
            alpha,
            i1: l * total,
            i2: (1.0 - l) * total,
            noise_rel: 0.0,
            repeats: 1,
            ..BenchConfig::default()
        };
        let beams = prepare_beams(&cfg).unwrap();
        let (rho, t) = combine_effective_state(&beams.0, &beams.1).unwrap();
        prop_assert!((t - total).abs() <= 1e-12 * total);
        for pair in [[Projector::H, Projector::V], [Projector::Plus, Projector::Minus], [Projector::R, Projector::L]] {
            let sum = noiseless_intensity(&beams, pair[0]) + noiseless_intensity(&beams, pair[1]);
            prop_assert!((sum - total).abs() <= 1e-12 * total.max(1.0));
        }
        let est = estimate_state(&cfg).unwrap();
        let analytic = [Observable::sigma_z(), Observable::sigma_x(), Observable::sigma_y()]
            .map(|o| measure_probs(&rho, &o));
        for (p, q) in est.probabilities().iter().zip(&analytic) {
            prop_assert!((p.p_plus - q.p_plus).abs() <= 1e-10);
        }
        let sp = est.rho.spectrum();
        prop_assert!((sp.lambda1 - l.min(1.0 - l)).abs() <= 1e-10);
        prop_assert!((fidelity(&est.rho, &cfg.target_state().unwrap()) - 1.0).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn robertson_relation(rho in state(), a in observable(), b in observable()) {
        let t = robertson_check(&rho, &a, &b);
        prop_assert!(t.lhs >= t.rhs - 1e-12, "{:?}", t);
    }
}

#[test]
fn majorization_bound_is_saturated_by_maximal_mixture() {
    let rho = DensityMatrix::maximally_mixed();
    assert_eq!(triple_majorization_bound(&rho), 3.0);
    assert_eq!(entropy_sum_three(&rho), 3.0);
}
