//! Safeguarded Newton–Raphson on the profiled log-likelihood.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LikelihoodWorkspace;
use crate::error::{Error, Result};
use crate::netcore::WeightMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub rho0: f64,
    /// Newton iterates are clamped to `[-bound, bound]`.
    pub bound: f64,
    pub max_iters: usize,
    pub step_tol: f64,
    /// Scaled by `n`.
    pub score_tol: f64,
    pub max_halvings: usize,
    /// Golden-section search runs on `(-fallback_bound, fallback_bound)`.
    pub fallback_bound: f64,
    pub bracket_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            rho0: 0.0,
            bound: 0.99,
            max_iters: 100,
            step_tol: 1e-8,
            score_tol: 1e-10,
            max_halvings: 20,
            fallback_bound: 0.999,
            bracket_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T = f64> {
    pub rho_hat: T,
    pub sigma2_hat: T,
    pub loglik: T,
    pub iterations: usize,
    pub converged: bool,
    pub used_fallback: bool,
}

/// Builds a workspace for `(y1, W11)` and maximises the likelihood.
pub fn fit<T: Real>(y1: &[T], w11: &DMatrix<T>, opts: &FitOptions) -> Result<FitResult<T>> {
    let ws = LikelihoodWorkspace::new(w11.clone(), y1)?;
    fit_workspace(&ws, opts)
}

/// Whole-network estimator: `S1` is every node.
pub fn fit_full<T: Real>(w: &WeightMatrix<T>, y: &[T], opts: &FitOptions) -> Result<FitResult<T>> {
    fit(y, &w.to_dense(), opts)
}

enum Outcome<T> {
    Done { rho: T, iterations: usize },
    Fallback { iterations: usize },
}

pub fn fit_workspace<T: Real>(ws: &LikelihoodWorkspace<T>, opts: &FitOptions) -> Result<FitResult<T>> {
    let (rho, iterations, used_fallback) = match newton(ws, opts)? {
        Outcome::Done { rho, iterations } => (rho, iterations, false),
        Outcome::Fallback { iterations } => {
            log::debug!("Newton abandoned after {iterations} iterations; golden-section fallback");
            (golden_section(ws, opts)?, iterations, true)
        }
    };
    Ok(FitResult {
        rho_hat: rho,
        sigma2_hat: ws.profile_sigma2(rho)?,
        loglik: ws.loglik(rho)?,
        iterations,
        converged: true,
        used_fallback,
    })
}

fn newton<T: Real>(ws: &LikelihoodWorkspace<T>, opts: &FitOptions) -> Result<Outcome<T>> {
    let bound = T::lit(opts.bound);
    let clamp = |r: T| r.max(-bound).min(bound);
    let score_tol = T::lit(opts.score_tol) * T::from_count(ws.n());
    let step_tol = T::lit(opts.step_tol);

    let mut rho = clamp(T::lit(opts.rho0));
    let mut ll = match ws.loglik(rho) {
        Ok(v) => v,
        Err(_) => return Ok(Outcome::Fallback { iterations: 0 }),
    };
    for it in 1..=opts.max_iters {
        let (s, h) = match (ws.score(rho), ws.hessian(rho)) {
            (Ok(s), Ok(h)) => (s, h),
            _ => return Ok(Outcome::Fallback { iterations: it }),
        };
        if s.abs() <= score_tol {
            return Ok(Outcome::Done { rho, iterations: it - 1 });
        }
        if !(h < T::zero()) {
            return Ok(Outcome::Fallback { iterations: it });
        }
        let mut step = -s / h;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand = clamp(rho + step);
            if cand == rho {
                // pinned at the box edge
                return Ok(Outcome::Fallback { iterations: it });
            }
            let ll_c = ws.loglik(cand).ok().filter(|v| v.is_finite());
            match ll_c {
                Some(v) if v >= ll || (cand - rho).abs() <= step_tol => {
                    accepted = Some((cand, v));
                    break;
                }
                _ => step *= T::lit(0.5),
            }
        }
        let Some((cand, v)) = accepted else {
            return Ok(Outcome::Fallback { iterations: it });
        };
        let delta = (cand - rho).abs();
        rho = cand;
        ll = v;
        if delta <= step_tol {
            return Ok(Outcome::Done { rho, iterations: it });
        }
    }
    Ok(Outcome::Fallback { iterations: opts.max_iters })
}

/// Golden-section maximisation; non-finite or failing evaluations count as
/// `-∞`.
fn golden_section<T: Real>(ws: &LikelihoodWorkspace<T>, opts: &FitOptions) -> Result<T> {
    let f =
        |r: f64| ws.loglik(T::lit(r)).ok().map(|v| v.as_f64()).filter(|v| v.is_finite()).unwrap_or(f64::NEG_INFINITY);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-opts.fallback_bound, opts.fallback_bound);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = f1.max(f2);
    while hi - lo > opts.bracket_tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        best = best.max(f1).max(f2);
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::Fit("log-likelihood is not finite anywhere on the search interval".into()));
    }
    let mid = 0.5 * (lo + hi);
    Ok(T::lit(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{row_normalize, AdjacencyMatrix};

    fn ring_workspace(y: &[f64]) -> LikelihoodWorkspace {
        let n = y.len();
        let adj = AdjacencyMatrix::from_edges(n, (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + 2) % n)]));
        let w: WeightMatrix = row_normalize(&adj);
        LikelihoodWorkspace::new(w.to_dense(), y).unwrap()
    }

    #[test]
    fn newton_reaches_stationary_point() {
        let y: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64 - 1.7).collect();
        let ws = ring_workspace(&y);
        let r = fit_workspace(&ws, &FitOptions::default()).unwrap();
        assert!(r.converged);
        assert!(ws.score(r.rho_hat).unwrap().abs() <= 1e-8 * 12.0);
        assert!(ws.hessian(r.rho_hat).unwrap() < 0.0);
        assert_eq!(r.sigma2_hat, ws.profile_sigma2(r.rho_hat).unwrap());
    }

    #[test]
    fn golden_section_agrees_with_newton() {
        let y: Vec<f64> = (0..15).map(|i| (i as f64 * 0.37).sin()).collect();
        let ws = ring_workspace(&y);
        let opts = FitOptions::default();
        let newton = fit_workspace(&ws, &opts).unwrap();
        let golden = golden_section(&ws, &opts).unwrap();
        assert!((newton.rho_hat - golden).abs() < 1e-6, "{} vs {golden}", newton.rho_hat);
    }

    #[test]
    fn forced_fallback_is_flagged() {
        let y: Vec<f64> = (0..10).map(|i| (i as f64).cos()).collect();
        let ws = ring_workspace(&y);
        let opts = FitOptions { max_iters: 0, ..FitOptions::default() };
        let r = fit_workspace(&ws, &opts).unwrap();
        assert!(r.used_fallback);
        let reference = fit_workspace(&ws, &FitOptions::default()).unwrap();
        assert!((r.rho_hat - reference.rho_hat).abs() < 1e-7);
    }
}
