//! Property-based invariants for the core numerics.

use proptest::prelude::*;
use speclab::covariance::{self, CovMatrix};
use speclab::distances::hellinger_gaussian;
use speclab::spectra::{SpectralModel, TWO_PI};

/// Strategy: a model with a short random tail and a variance term large
/// enough to keep the density strictly positive.
fn model_strategy() -> impl Strategy<Value = SpectralModel> {
    prop::collection::vec(-0.5f64..0.5, 1..6).prop_map(|tail| {
        // the additive floor keeps min f bounded away from zero so the
        // covariance matrices stay well-conditioned for the eigen solver
        let g0 = 2.0 * tail.iter().map(|g| g.abs()).sum::<f64>() + 1.0;
        let mut autocov = vec![g0];
        autocov.extend(tail);
        SpectralModel::new("prop", autocov, 1.0, 30.0).unwrap()
    })
}

proptest! {
    #[test]
    fn density_is_even(model in model_strategy(), w in 0.0..std::f64::consts::PI) {
        let plus = model.eval_density(w).unwrap();
        let minus = model.eval_density(-w).unwrap();
        prop_assert!((plus - minus).abs() < 1e-12 * plus.abs().max(1.0));
    }

    #[test]
    fn cell_averages_mean_is_variance_over_two_pi(model in model_strategy(), n in 2usize..200) {
        let cells = model.cell_averages(n);
        let mean = cells.iter().sum::<f64>() / n as f64;
        let expected = model.gamma(0) / TWO_PI;
        prop_assert!((mean - expected).abs() < 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn refinement_means_recover_coarse_cells(model in model_strategy(), n in 2usize..100) {
        let coarse = model.cell_averages(n);
        let fine = model.cell_averages(2 * n);
        for j in 0..n {
            let mean = 0.5 * (fine[2 * j] + fine[2 * j + 1]);
            prop_assert!((mean - coarse[j]).abs() < 1e-10 * coarse[j].abs().max(1.0));
        }
    }

    #[test]
    fn truncation_never_increases_the_seminorm(model in model_strategy(), n in 3usize..20) {
        let n = if n % 2 == 0 { n + 1 } else { n };
        let trunc = model.truncated_series(n).unwrap();
        let (semi_full, _) = model.sobolev_norm(1.0).unwrap();
        let (semi_trunc, _) = trunc.sobolev_norm(1.0).unwrap();
        prop_assert!(semi_trunc <= semi_full + 1e-12);
    }

    #[test]
    fn parseval_on_a_fine_grid(model in model_strategy()) {
        // midpoint rule for ∫ f² over [-π, π] against the coefficient form
        let n = 4096usize;
        let sum: f64 = (0..n)
            .map(|i| {
                let w = -std::f64::consts::PI + TWO_PI * (i as f64 + 0.5) / n as f64;
                model.eval_density(w).unwrap().powi(2)
            })
            .sum();
        let integral = sum * TWO_PI / n as f64;
        let (_, norm_sq) = model.sobolev_norm(0.0).unwrap();
        let expected = norm_sq / TWO_PI;
        prop_assert!((integral - expected).abs() < 1e-8 * expected.max(1.0));
    }

    #[test]
    fn h_squared_is_two_one_minus_affinity(model in model_strategy(), n in 3usize..20) {
        let n = if n % 2 == 0 { n + 1 } else { n };
        let a = covariance::toeplitz(&model, n);
        let b = covariance::circulant(&model, n).unwrap();
        let r = hellinger_gaussian(&a, &b).unwrap();
        prop_assert!((r.h_squared - 2.0 * (1.0 - r.affinity)).abs() < 1e-12);
    }

    #[test]
    fn block_diagonal_affinity_is_the_product(model in model_strategy(), n in 2usize..8) {
        // affinity of a block-diagonal pair factors over the blocks
        let a1 = covariance::toeplitz(&model, n).mat;
        let b1 = a1.clone() * 1.3;
        let scale = model.scaled(2.0);
        let a2 = covariance::toeplitz(&scale, n + 1).mat;
        let b2 = a2.clone() * 0.8;
        let dim = a1.nrows() + a2.nrows();
        let mut big_a = nalgebra::DMatrix::zeros(dim, dim);
        let mut big_b = nalgebra::DMatrix::zeros(dim, dim);
        big_a.view_mut((0, 0), (n, n)).copy_from(&a1);
        big_a.view_mut((n, n), (n + 1, n + 1)).copy_from(&a2);
        big_b.view_mut((0, 0), (n, n)).copy_from(&b1);
        big_b.view_mut((n, n), (n + 1, n + 1)).copy_from(&b2);
        let whole = hellinger_gaussian(&CovMatrix { mat: big_a }, &CovMatrix { mat: big_b }).unwrap();
        let p1 = hellinger_gaussian(&CovMatrix { mat: a1 }, &CovMatrix { mat: b1 }).unwrap();
        let p2 = hellinger_gaussian(&CovMatrix { mat: a2 }, &CovMatrix { mat: b2 }).unwrap();
        let product = p1.affinity * p2.affinity;
        prop_assert!((whole.affinity - product).abs() < 1e-10);
    }

    #[test]
    fn model_json_round_trip(model in model_strategy()) {
        let back = SpectralModel::from_json(&model.to_json()).unwrap();
        prop_assert_eq!(model.autocov, back.autocov);
        prop_assert_eq!(model.alpha, back.alpha);
        prop_assert_eq!(model.big_m, back.big_m);
    }
}
