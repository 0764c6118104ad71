mod common;

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use subsar::dgp::{draw_errors, ErrorDist};
use subsar::netcore::row_normalize;
use subsar::qmle::{fit, fit_full, lu_log_det, FitOptions, LikelihoodWorkspace, LogDetBackend};
use subsar::rng;

fn instance(n: usize, rho: f64, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
    let mut r = rng::from_seed(seed);
    let w = common::random_w11(n, &mut r);
    let e: Vec<f64> = draw_errors(ErrorDist::Exp, n, &mut r);
    let y = common::dense_solve(&w, rho, &e);
    (w, y.iter().copied().collect())
}

#[test]
fn loglik_matches_dense_formula() {
    for seed in 0..5 {
        let (w, y) = instance(40, 0.3, seed);
        let ws = LikelihoodWorkspace::new(w.clone(), &y).unwrap();
        for rho in [-0.9, -0.4, 0.0, 0.25, 0.7, 0.95] {
            let got = ws.loglik(rho).unwrap();
            let want = common::loglik_oracle(&w, &y, rho);
            assert!(common::rel_err(got, want) < 1e-10, "rho {rho}: {got} vs {want}");
        }
    }
}

#[test]
fn newton_lands_on_grid_maximiser() {
    for seed in 10..20 {
        let (w, y) = instance(30, 0.4, seed);
        let f = fit(&y, &w, &FitOptions::default()).unwrap();
        let g = common::grid_argmax(&w, &y, 1e-4, FitOptions::default().fallback_bound);
        assert!((f.rho_hat - g).abs() <= 2e-4, "seed {seed}: {} vs {g}", f.rho_hat);
    }
}

#[test]
fn sigma2_hat_is_profile_at_rho_hat() {
    let (w, y) = instance(50, -0.3, 3);
    let f = fit(&y, &w, &FitOptions::default()).unwrap();
    let yv = nalgebra::DVector::from_column_slice(&y);
    let r = &yv - (&w * &yv) * f.rho_hat;
    assert_relative_eq!(f.sigma2_hat, r.norm_squared() / 50.0, max_relative = 1e-12);
}

#[test]
fn scale_equivariance() {
    let (w, y) = instance(40, 0.5, 8);
    let a = fit(&y, &w, &FitOptions::default()).unwrap();
    let c = 7.5;
    let yc: Vec<f64> = y.iter().map(|v| v * c).collect();
    let b = fit(&yc, &w, &FitOptions::default()).unwrap();
    assert!((a.rho_hat - b.rho_hat).abs() < 1e-8);
    assert_relative_eq!(b.sigma2_hat, a.sigma2_hat * c * c, max_relative = 1e-8);
}

#[test]
fn full_network_fit_matches_dense_block() {
    let mut r = rng::from_seed(4);
    let adj = common::random_graph(80, 5, &mut r);
    let w = row_normalize::<f64>(&adj);
    let e: Vec<f64> = draw_errors(ErrorDist::Norm, 80, &mut r);
    let y: Vec<f64> = common::dense_solve(&common::dense_weights(&adj), 0.6, &e).iter().copied().collect();
    let a = fit_full(&w, &y, &FitOptions::default()).unwrap();
    let b = fit(&y, &common::dense_weights(&adj), &FitOptions::default()).unwrap();
    assert!((a.rho_hat - b.rho_hat).abs() < 1e-10);
    assert!(a.converged);
}

#[test]
fn backends_agree_on_fit() {
    let (w, y) = instance(60, 0.2, 21);
    let opts = FitOptions::default();
    let eig = LikelihoodWorkspace::with_backend(w.clone(), &y, LogDetBackend::Eigen).unwrap();
    let lu = LikelihoodWorkspace::with_backend(w.clone(), &y, LogDetBackend::Lu).unwrap();
    let a = subsar::qmle::fit_workspace(&eig, &opts).unwrap();
    let b = subsar::qmle::fit_workspace(&lu, &opts).unwrap();
    assert!((a.rho_hat - b.rho_hat).abs() < 1e-8);
    assert_relative_eq!(lu_log_det(&w, 0.5).unwrap(), common::dense_log_det(&w, 0.5), max_relative = 1e-12);
}

#[test]
fn single_precision_tracks_double() {
    let (w, y) = instance(30, 0.4, 2);
    let f64_fit = fit(&y, &w, &FitOptions::default()).unwrap();
    let w32 = w.map(|v| v as f32);
    let y32: Vec<f32> = y.iter().map(|&v| v as f32).collect();
    let f32_fit = fit(&y32, &w32, &FitOptions::default()).unwrap();
    assert!((f32_fit.rho_hat as f64 - f64_fit.rho_hat).abs() < 1e-3);
}
