mod common;

use approx::assert_relative_eq;
use subsar::dgp::{draw_errors, simulate, DgpConfig, ErrorDist};
use subsar::inference::{
    bootstrap_se, confidence_interval, estimate, plugin_se, se_ingredients, variance_components, SeVariant,
};
use subsar::netcore::{extract_selection, row_normalize};
use subsar::qmle::FitOptions;
use subsar::rng;
use subsar::sampler::{SamplerMethod, SamplerSpec};

#[test]
fn interval_uses_normal_quantile() {
    let ci = confidence_interval(0.2, 0.1, 0.95).unwrap();
    let z = common::normal_quantile(0.975);
    assert!((ci.ci_lo - (0.2 - z * 0.1)).abs() < 1e-9);
    assert!((ci.ci_hi - (0.2 + z * 0.1)).abs() < 1e-9);
    assert!((ci.ci_lo - 0.00400).abs() < 5e-6 && (ci.ci_hi - 0.39600).abs() < 5e-6);

    let half = confidence_interval(0.0, 1.0, 0.5).unwrap();
    assert!((half.ci_hi - common::normal_quantile(0.75)).abs() < 1e-9);
    assert!((half.ci_hi - 0.67449).abs() < 1e-5);
}

#[test]
fn interval_rejects_bad_inputs() {
    assert!(confidence_interval(0.0, 0.1, 1.0).is_err());
    assert!(confidence_interval(0.0, 0.1, 0.0).is_err());
    assert!(confidence_interval(0.0, -0.1, 0.9).is_err());
}

#[test]
fn traces_match_dense_oracle() {
    let mut r = rng::from_seed(30);
    let w = common::random_w11(30, &mut r);
    let y: Vec<f64> = draw_errors(ErrorDist::Exp, 30, &mut r);
    let rho = 0.35;
    let ing = se_ingredients(rho, 1.3, &y, &w).unwrap();
    let m = common::m_matrix(&w, rho);
    let n = 30.0;
    assert_relative_eq!(ing.tr_m, m.trace(), max_relative = 1e-10);
    assert_relative_eq!(ing.tr_m2, (&m * &m).trace(), max_relative = 1e-10);
    assert_relative_eq!(ing.tr_mtm, (m.transpose() * &m).trace(), max_relative = 1e-10);
    assert_relative_eq!(ing.tr_diag2, m.diagonal().norm_squared(), max_relative = 1e-10);

    // σ²₁ from the centred-diagonal form, σ²₂ from its definition
    let t = m.trace();
    let kurt = ing.mu4_hat / (1.3 * 1.3);
    let centred: f64 = m.diagonal().iter().map(|d| (d - t / n).powi(2)).sum();
    let common_part = ing.tr_mtm / n + ing.tr_m2 / n - 2.0 * t * t / (n * n);
    let (s1, s2) = variance_components(&ing, SeVariant::Lemma2);
    assert_relative_eq!(s1, (kurt - 3.0) * centred / n + common_part, max_relative = 1e-10);
    assert_relative_eq!(s2, common_part.abs(), max_relative = 1e-10);
    assert_relative_eq!(plugin_se(&ing, SeVariant::Lemma2).unwrap(), s1.sqrt() / (s2 * n.sqrt()), max_relative = 1e-12);
}

#[test]
fn residual_fourth_moment() {
    let mut r = rng::from_seed(31);
    let w = common::random_w11(25, &mut r);
    let y: Vec<f64> = draw_errors(ErrorDist::Norm, 25, &mut r);
    let ing = se_ingredients(0.1, 1.0, &y, &w).unwrap();
    let yv = nalgebra::DVector::from_column_slice(&y);
    let e = &yv - (&w * &yv) * 0.1;
    let want = e.iter().map(|v| v.powi(4)).sum::<f64>() / 25.0;
    assert_relative_eq!(ing.mu4_hat, want, max_relative = 1e-12);
}

#[test]
fn estimate_bundles_fit_and_interval() {
    let mut r = rng::from_seed(32);
    let w = common::random_w11(60, &mut r);
    let e: Vec<f64> = draw_errors(ErrorDist::Exp, 60, &mut r);
    let y: Vec<f64> = common::dense_solve(&w, 0.3, &e).iter().copied().collect();
    let est = estimate(&y, &w, &FitOptions::default(), SeVariant::Lemma2, 0.9).unwrap();
    let ing = se_ingredients(est.fit.rho_hat, est.fit.sigma2_hat, &y, &w).unwrap();
    assert_relative_eq!(est.interval.se, plugin_se(&ing, SeVariant::Lemma2).unwrap(), max_relative = 1e-12);
    assert!(est.interval.covers(est.fit.rho_hat));
    assert_eq!(est.interval.level, 0.9);
}

#[test]
fn bootstrap_is_reproducible_and_spread_matches_estimates() {
    let mut r = rng::from_seed(33);
    let adj = common::random_graph(600, 6, &mut r);
    let w = row_normalize::<f64>(&adj);
    let mut cfg = DgpConfig::new(0.3, ErrorDist::Exp);
    cfg.seed = 5;
    let (_, resp) = simulate(&w, &cfg).unwrap();
    let spec = SamplerSpec::new(SamplerMethod::Snow, 60, 0);
    let a = bootstrap_se(&adj, &w, &resp.y, &spec, 10, 99, &FitOptions::default()).unwrap();
    let b = bootstrap_se(&adj, &w, &resp.y, &spec, 10, 99, &FitOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n_success, a.estimates.len());
    let k = a.estimates.len() as f64;
    let mean = a.estimates.iter().sum::<f64>() / k;
    let sd = (a.estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k).sqrt();
    assert_relative_eq!(a.se_bt, sd, max_relative = 1e-12);
    // replicate 0 is an ordinary subnetwork fit under the derived seed
    let mut first_spec = spec.clone();
    first_spec.seed = rng::derive_seed(99, &[0]);
    let nodes = subsar::sampler::sample(&adj, &first_spec).unwrap().nodes;
    let sel = extract_selection(&w, &nodes, false).unwrap();
    let first = subsar::qmle::fit(&sel.restrict(&resp.y), &sel.w11, &FitOptions::default()).unwrap();
    assert!(a.estimates.contains(&first.rho_hat));
}
