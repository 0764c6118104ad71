//! Numerical diagnostics for the regularity conditions: concentration of the
//! stationary distribution, bounded in-degree and weak coupling between the
//! sampled block and the rest of the network.

use nalgebra::{DMatrix, SymmetricEigen};
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::{AdjacencyMatrix, SubnetSelection, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Weight on the previous iterate: `π ← dπ + (1−d)Wᵀπ`.
    pub damping: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iters: 100_000, damping: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stationary {
    pub pi: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Nodes outside the largest strongly connected component (`π_i = 0`).
    pub n_outside: usize,
}

/// Power iteration on `Wᵀ` from the uniform vector.
///
/// The chain is restricted to the largest strongly connected component with
/// rows renormalised inside it; other nodes get zero mass.
pub fn stationary_dist(w: &WeightMatrix, opts: &StationaryOptions) -> Stationary {
    let n = w.n_nodes();
    if n == 0 {
        return Stationary { pi: Vec::new(), iterations: 0, converged: true, n_outside: 0 };
    }
    let comp = largest_scc(w);
    let mut local = vec![usize::MAX; n];
    for (p, &i) in comp.iter().enumerate() {
        local[i] = p;
    }
    // restricted, renormalised transition lists
    let rows: Vec<Vec<(usize, f64)>> = comp
        .iter()
        .map(|&i| {
            let (cols, vals) = w.row(i);
            let kept: Vec<(usize, f64)> =
                cols.iter().zip(vals).filter(|(&j, _)| local[j] != usize::MAX).map(|(&j, &v)| (local[j], v)).collect();
            let s: f64 = kept.iter().map(|e| e.1).sum();
            kept.into_iter().map(|(j, v)| (j, v / s)).collect()
        })
        .collect();

    let m = comp.len();
    if m == 1 {
        // a lone node, possibly without a self loop, holds all the mass
        let mut full = vec![0.0; n];
        full[comp[0]] = 1.0;
        return Stationary { pi: full, iterations: 0, converged: true, n_outside: n - 1 };
    }
    let mut pi = vec![1.0 / m as f64; m];
    let mut next = vec![0.0; m];
    let d = opts.damping;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        next.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                next[j] += v * pi[i];
            }
        }
        let total: f64 = next.iter().sum();
        let mut diff = 0.0;
        for (p, q) in pi.iter_mut().zip(&next) {
            let v = d * *p + (1.0 - d) * q / total;
            diff += (v - *p).abs();
            *p = v;
        }
        if diff <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("stationary distribution did not converge in {iterations} iterations");
    }
    let mut full = vec![0.0; n];
    for (p, &i) in comp.iter().enumerate() {
        full[i] = pi[p];
    }
    Stationary { pi: full, iterations, converged, n_outside: n - m }
}

fn largest_scc(w: &WeightMatrix) -> Vec<usize> {
    let n = w.n_nodes();
    let mut g = DiGraph::<(), ()>::with_capacity(n, w.nnz());
    let idx: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, &from) in idx.iter().enumerate() {
        for &j in w.row(i).0 {
            g.add_edge(from, idx[j], ());
        }
    }
    let mut best = kosaraju_scc(&g)
        .into_iter()
        .max_by_key(|c| c.len())
        .map(|c| c.into_iter().map(|v| v.index()).collect::<Vec<_>>())
        .unwrap_or_default();
    best.sort_unstable();
    best
}

/// `√N Σ π_i²`.
pub fn check_c1(pi: &[f64], n_total: usize) -> f64 {
    (n_total as f64).sqrt() * pi.iter().map(|p| p * p).sum::<f64>()
}

/// Maximum column sum of `A` (largest in-degree).
pub fn check_c2(adj: &AdjacencyMatrix) -> f64 {
    adj.in_degrees().into_iter().max().unwrap_or(0) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C3Options {
    /// Largest `N − n` for which the `W22` factor of `c_min` is exact.
    pub dense_threshold: usize,
    pub power_tol: f64,
    pub power_max_iters: usize,
}

impl Default for C3Options {
    fn default() -> Self {
        Self { dense_threshold: 4000, power_tol: 1e-9, power_max_iters: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C3Report {
    pub delta1: f64,
    pub delta2: f64,
    pub lambda_w12: f64,
    pub lambda_w21: f64,
    pub c_min: f64,
    /// `c_min` used `(1 − |ρ|)²` for the `W22` factor.
    pub c_min_approximate: bool,
    pub power_iters: usize,
}

/// `Δ1 = ρ² c_min⁻² λmax(W12ᵀW12) λmax(W21ᵀW21)` and
/// `Δ2 = (‖W12‖²_F + ‖W21‖²_F)/√n`.
pub fn check_c3(w: &WeightMatrix, sel: &SubnetSelection, rho: f64, opts: &C3Options) -> Result<C3Report> {
    let (Some(w12), Some(w21)) = (&sel.w12, &sel.w21) else {
        return Err(Error::Config("check_c3 needs the boundary blocks; extract with keep_blocks".into()));
    };
    let n = sel.len();
    let delta2 = (sel.w12_frobenius_sq + sel.w21_frobenius_sq) / (n as f64).sqrt();

    // λmax(W12ᵀW12) = λmax(W12W12ᵀ); both products act on ℝⁿ
    let (lambda_w12, it12) =
        power_max(n, |v| w12.mul_vec(&w12.mul_transpose_vec(v)), opts.power_tol, opts.power_max_iters);
    let (lambda_w21, it21) =
        power_max(n, |v| w21.mul_transpose_vec(&w21.mul_vec(v)), opts.power_tol, opts.power_max_iters);

    let c11 = min_singular_sq(&sel.w11, rho);
    let n_out = sel.outside.len();
    let (c22, approximate) = if n_out == 0 {
        (f64::INFINITY, false)
    } else if n_out <= opts.dense_threshold {
        (min_singular_sq(&w22_dense(w, &sel.outside), rho), false)
    } else {
        ((1.0 - rho.abs()).powi(2), true)
    };
    let c_min = c11.min(c22);
    let delta1 = if rho == 0.0 || lambda_w12 == 0.0 || lambda_w21 == 0.0 {
        0.0
    } else {
        rho * rho * lambda_w12 * lambda_w21 / (c_min * c_min)
    };
    Ok(C3Report {
        delta1,
        delta2,
        lambda_w12,
        lambda_w21,
        c_min,
        c_min_approximate: approximate,
        power_iters: it12 + it21,
    })
}

/// `λ_min{(I − ρB)ᵀ(I − ρB)}`.
fn min_singular_sq(b: &DMatrix<f64>, rho: f64) -> f64 {
    let n = b.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    let m = DMatrix::identity(n, n) - b * rho;
    let g = m.transpose() * &m;
    SymmetricEigen::new(g).eigenvalues.min().max(0.0)
}

fn w22_dense(w: &WeightMatrix, outside: &[usize]) -> DMatrix<f64> {
    let mut pos = vec![usize::MAX; w.n_nodes()];
    for (q, &i) in outside.iter().enumerate() {
        pos[i] = q;
    }
    let mut d = DMatrix::zeros(outside.len(), outside.len());
    for (q, &i) in outside.iter().enumerate() {
        let (cols, vals) = w.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if pos[j] != usize::MAX {
                d[(q, pos[j])] = v;
            }
        }
    }
    d
}

/// Largest eigenvalue of a PSD operator by power iteration. Stops when the
/// residual `‖Av − λv‖` drops below `tol·λ` or the Rayleigh quotient stalls.
fn power_max<F: Fn(&[f64]) -> Vec<f64>>(n: usize, op: F, tol: f64, max_iters: usize) -> (f64, usize) {
    if n == 0 {
        return (0.0, 0);
    }
    // non-uniform start so no eigenvector is orthogonal by symmetry
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for it in 1..=max_iters {
        let av = op(&v);
        let rq: f64 = av.iter().zip(&v).map(|(a, b)| a * b).sum();
        if rq <= 0.0 {
            return (0.0, it);
        }
        let resid = av.iter().zip(&v).map(|(a, b)| (a - rq * b).powi(2)).sum::<f64>().sqrt();
        let stalled = (rq - lambda).abs() <= 1e-15 * rq;
        lambda = rq;
        if resid <= tol * rq || stalled {
            return (lambda, it);
        }
        v = av;
        normalize(&mut v);
    }
    log::warn!("power iteration hit {max_iters} iterations");
    (lambda, max_iters)
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// All diagnostics for one network and subnetwork.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub pi_stat: f64,
    pub a_max: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub power_iters: usize,
    pub converged: bool,
    pub n_outside_scc: usize,
    pub c_min: f64,
    pub c_min_approximate: bool,
}

pub fn verify_conditions(
    adj: &AdjacencyMatrix,
    w: &WeightMatrix,
    sel: &SubnetSelection,
    rho: f64,
) -> Result<ConditionReport> {
    let st = stationary_dist(w, &StationaryOptions::default());
    let c3 = check_c3(w, sel, rho, &C3Options::default())?;
    Ok(ConditionReport {
        pi_stat: check_c1(&st.pi, w.n_nodes()),
        a_max: check_c2(adj),
        delta1: c3.delta1,
        delta2: c3.delta2,
        power_iters: st.iterations + c3.power_iters,
        converged: st.converged,
        n_outside_scc: st.n_outside,
        c_min: c3.c_min,
        c_min_approximate: c3.c_min_approximate,
    })
}
