mod common;

use subsar::dgp::{draw_errors, gen_response, simulate, DgpConfig, ErrorDist};
use subsar::netcore::row_normalize;
use subsar::rng;

#[test]
fn neumann_matches_dense_solve_for_both_signs() {
    let mut r = rng::from_seed(1);
    for rho in [-0.9, -0.3, 0.0, 0.45, 0.9] {
        let adj = common::random_graph(150, 6, &mut r);
        let w = row_normalize::<f64>(&adj);
        let e: Vec<f64> = draw_errors(ErrorDist::Norm, 150, &mut r);
        let got = gen_response(&w, &DgpConfig::new(rho, ErrorDist::Norm), &e).unwrap();
        let want = common::dense_solve(&common::dense_weights(&adj), rho, &e);
        let dev = got.y.iter().zip(want.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev <= 1e-8, "rho {rho}: deviation {dev}");
        assert!(!got.hit_cap);
    }
}

#[test]
fn truncation_depth_follows_tail_bound() {
    let mut r = rng::from_seed(2);
    let adj = common::random_graph(50, 4, &mut r);
    let w = row_normalize::<f64>(&adj);
    let e = vec![1.0; 50];
    let cfg = DgpConfig::new(0.5, ErrorDist::Norm);
    let m = gen_response(&w, &cfg, &e).unwrap().truncation_m;
    // smallest m with 0.5^(m+1) / 0.5 < 1e-10
    let want = (0..).find(|&m| 0.5f64.powi(m + 1) / 0.5 < 1e-10).unwrap() as usize;
    assert_eq!(m, want);
}

#[test]
fn cap_is_reported() {
    let adj = common::random_graph(20, 3, &mut rng::from_seed(3));
    let w = row_normalize::<f64>(&adj);
    let mut cfg = DgpConfig::new(0.99, ErrorDist::Norm);
    cfg.m_cap = 5;
    let (_, resp) = simulate(&w, &cfg).unwrap();
    assert!(resp.hit_cap);
    assert_eq!(resp.truncation_m, 5);
}

#[test]
fn error_moments() {
    let n = 400_000;
    for (dist, mu4) in [(ErrorDist::Norm, 3.0), (ErrorDist::Exp, 9.0)] {
        let e: Vec<f64> = draw_errors(dist, n, &mut rng::from_seed(9));
        let nf = n as f64;
        let mean = e.iter().sum::<f64>() / nf;
        let var = e.iter().map(|x| x * x).sum::<f64>() / nf;
        let m4 = e.iter().map(|x| x.powi(4)).sum::<f64>() / nf;
        assert!(mean.abs() < 0.01, "{dist:?} mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "{dist:?} var {var}");
        assert!((m4 - mu4).abs() < 0.1 * mu4, "{dist:?} fourth moment {m4}");
        assert_eq!(dist.fourth_moment(), mu4);
    }
}

#[test]
fn simulate_is_reproducible() {
    let adj = common::random_graph(100, 5, &mut rng::from_seed(4));
    let w = row_normalize::<f64>(&adj);
    let mut cfg = DgpConfig::new(0.4, ErrorDist::Exp);
    cfg.seed = 77;
    let a = simulate(&w, &cfg).unwrap();
    let b = simulate(&w, &cfg).unwrap();
    assert_eq!(a.1.y, b.1.y);
    cfg.seed = 78;
    assert_ne!(simulate(&w, &cfg).unwrap().1.y, a.1.y);
}
