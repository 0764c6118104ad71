//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use subsar::netcore::AdjacencyMatrix;

/// Directed graph with out-degrees uniform on `0..=max_out` and uniformly
/// chosen targets (no self loops).
pub fn random_graph<R: Rng>(n: usize, max_out: usize, rng: &mut R) -> AdjacencyMatrix {
    let mut edges = Vec::new();
    for i in 0..n {
        let d = rng.random_range(0..=max_out);
        for _ in 0..d {
            let j = rng.random_range(0..n);
            if j != i {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edges(n, edges)
}

/// Dense `W` with `w_ij = a_ij / d_i`, built straight from the edge list.
pub fn dense_weights(adj: &AdjacencyMatrix) -> DMatrix<f64> {
    let n = adj.n_nodes();
    let mut w = DMatrix::zeros(n, n);
    for (i, j) in adj.edges() {
        w[(i, j)] = 1.0;
    }
    for i in 0..n {
        let d: f64 = w.row(i).sum();
        if d > 0.0 {
            w.row_mut(i).scale_mut(1.0 / d);
        }
    }
    w
}

/// Leading `n × n` block of a row-normalised random graph on `2n` nodes, so
/// rows sum to at most one.
pub fn random_w11<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let adj = random_graph(2 * n, 6, rng);
    dense_weights(&adj).view((0, 0), (n, n)).into_owned()
}

/// `(I − ρW)⁻¹ e` by dense LU.
pub fn dense_solve(w: &DMatrix<f64>, rho: f64, e: &[f64]) -> DVector<f64> {
    let n = w.nrows();
    let a = DMatrix::identity(n, n) - w * rho;
    a.lu().solve(&DVector::from_column_slice(e)).expect("I - rho W is nonsingular")
}

/// `ln |det(I − ρW)|` from the diagonal of a partial-pivot LU.
pub fn dense_log_det(w: &DMatrix<f64>, rho: f64) -> f64 {
    let n = w.nrows();
    let lu = (DMatrix::identity(n, n) - w * rho).lu();
    lu.u().diagonal().iter().map(|d| d.abs().ln()).sum()
}

/// Profiled Gaussian log-likelihood evaluated directly.
pub fn loglik_oracle(w: &DMatrix<f64>, y: &[f64], rho: f64) -> f64 {
    let n = y.len() as f64;
    let yv = DVector::from_column_slice(y);
    let r = &yv - (w * &yv) * rho;
    let s2 = r.norm_squared() / n;
    -n / 2.0 * ((2.0 * std::f64::consts::PI).ln() + 1.0) - n / 2.0 * s2.ln() + dense_log_det(w, rho)
}

/// Maximiser of [`loglik_oracle`] on a grid of spacing `step` over
/// `[-bound, bound]`: a coarse pass at `100 step` and a fine pass around
/// its best point.
pub fn grid_argmax(w: &DMatrix<f64>, y: &[f64], step: f64, bound: f64) -> f64 {
    let best_on = |lo: f64, hi: f64, h: f64| {
        let k = ((hi - lo) / h).round() as i64;
        (0..=k)
            .map(|i| (lo + i as f64 * h).clamp(-bound, bound))
            .map(|r| (r, loglik_oracle(w, y, r)))
            .fold((0.0, f64::NEG_INFINITY), |acc, (r, l)| if l > acc.1 { (r, l) } else { acc })
            .0
    };
    let coarse = 100.0 * step;
    let c = best_on(-bound, bound, coarse);
    best_on((c - coarse).max(-bound), (c + coarse).min(bound), step)
}

/// `M = W(I − ρW)⁻¹` by dense inverse.
pub fn m_matrix(w: &DMatrix<f64>, rho: f64) -> DMatrix<f64> {
    let n = w.nrows();
    let inv = (DMatrix::identity(n, n) - w * rho).try_inverse().expect("invertible");
    w * inv
}

/// Standard normal CDF by composite Simpson integration of the density.
pub fn normal_cdf(z: f64) -> f64 {
    let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let steps = 4000;
    let h = z.abs() / steps as f64;
    let mut acc = pdf(0.0) + pdf(z.abs());
    for k in 1..steps {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * pdf(k as f64 * h);
    }
    let half = acc * h / 3.0;
    if z >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Inverse of [`normal_cdf`] by bisection.
pub fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|a − b| / max(|b|, 1)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// `(Δ1, Δ2)` from dense blocks of `W` and full SVDs.
pub fn dense_c3(w: &DMatrix<f64>, s1: &[usize], rho: f64) -> (f64, f64) {
    let n_total = w.nrows();
    let s2: Vec<usize> = (0..n_total).filter(|i| !s1.contains(i)).collect();
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |a, b| w[(rows[a], cols[b])]);
    let (w11, w12, w21, w22) = (pick(s1, s1), pick(s1, &s2), pick(&s2, s1), pick(&s2, &s2));
    let smallest_sv_sq = |b: &DMatrix<f64>| {
        let m = DMatrix::identity(b.nrows(), b.nrows()) - b * rho;
        m.singular_values().min().powi(2)
    };
    let largest = |b: &DMatrix<f64>| b.singular_values().max().powi(2);
    let c_min = smallest_sv_sq(&w11).min(smallest_sv_sq(&w22));
    let n = s1.len() as f64;
    let delta1 = rho * rho * largest(&w12) * largest(&w21) / (c_min * c_min);
    let delta2 = (w12.norm_squared() + w21.norm_squared()) / n.sqrt();
    (delta1, delta2)
}
