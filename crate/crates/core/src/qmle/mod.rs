//! Profiled Gaussian quasi-likelihood of the SAR model on a (sub)network.
//!
//! With `a = yᵀy`, `b = yᵀWy`, `c = ‖Wy‖²` the profiled variance is
//! `σ̃²(ρ) = (a − 2ρb + ρ²c)/n` and
//!
//! ```text
//! ℓ(ρ)  = −n/2 (ln 2π + 1) − n/2 ln σ̃²(ρ) + ln|I − ρW|
//! ℓ'(ρ) = (b − ρc)/σ̃² − tr{W(I − ρW)⁻¹}
//! ℓ''(ρ) = 2(b − ρc)²/(nσ̃⁴) − c/σ̃² − tr[{W(I − ρW)⁻¹}²]
//! ```
//!
//! The eigen backend computes the spectrum of `W` once so that each of the
//! three functions costs `O(n)`. The LU backend refactorises `I − ρW` per
//! call and is used for large `n` or when the Schur iteration fails.

mod fit;

pub use fit::{fit, fit_full, fit_workspace, FitOptions, FitResult};

use nalgebra::{DMatrix, DVector, Schur};
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;
use rand::Rng;

/// Dimension above which [`LikelihoodWorkspace::new`] picks the LU backend.
pub const DEFAULT_LU_THRESHOLD: usize = 4096;

const SINGULAR_GAP: f64 = 1e-14;
const SIMILARITY_RETRIES: u64 = 3;
/// QR sweeps allowed per eigenvalue before a Schur iteration gives up.
const SCHUR_ITERS_PER_EIG: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogDetBackend {
    Eigen,
    Lu,
}

/// Per-fit state: `W11`, `y1`, cached products and optionally the spectrum.
#[derive(Debug, Clone)]
pub struct LikelihoodWorkspace<T: Real = f64> {
    w: DMatrix<T>,
    y: DVector<T>,
    wy: DVector<T>,
    /// `(Re λ, Im λ)` pairs; present for the eigen backend.
    eigvals: Option<Vec<(T, T)>>,
    a: T,
    b: T,
    c: T,
}

impl<T: Real> LikelihoodWorkspace<T> {
    /// Uses the eigen backend up to [`DEFAULT_LU_THRESHOLD`].
    pub fn new(w11: DMatrix<T>, y1: &[T]) -> Result<Self> {
        let backend = if w11.nrows() > DEFAULT_LU_THRESHOLD { LogDetBackend::Lu } else { LogDetBackend::Eigen };
        Self::with_backend(w11, y1, backend)
    }

    pub fn with_backend(w11: DMatrix<T>, y1: &[T], backend: LogDetBackend) -> Result<Self> {
        let n = y1.len();
        if !w11.is_square() || w11.nrows() != n {
            return Err(Error::Domain(format!("W11 is {}x{} but y1 has length {n}", w11.nrows(), w11.ncols())));
        }
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 nodes, got {n}")));
        }
        let y = DVector::from_column_slice(y1);
        let wy = &w11 * &y;
        let a = y.dot(&y);
        if !(a > T::zero()) {
            return Err(Error::DegenerateData);
        }
        let b = y.dot(&wy);
        let c = wy.dot(&wy);
        let eigvals = match backend {
            LogDetBackend::Lu => None,
            LogDetBackend::Eigen => match spectrum(&w11) {
                Ok(eigs) => Some(eigs),
                Err(e) => {
                    log::warn!("eigen backend unavailable ({e}); using LU");
                    None
                }
            },
        };
        Ok(Self { w: w11, y, wy, eigvals, a, b, c })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn backend(&self) -> LogDetBackend {
        if self.eigvals.is_some() {
            LogDetBackend::Eigen
        } else {
            LogDetBackend::Lu
        }
    }

    pub fn w11(&self) -> &DMatrix<T> {
        &self.w
    }

    pub fn y1(&self) -> &[T] {
        self.y.as_slice()
    }

    /// `(Re λ, Im λ)` of `W11` when the eigen backend is active.
    pub fn eigenvalues(&self) -> Option<&[(T, T)]> {
        self.eigvals.as_deref()
    }

    /// `n⁻¹ ‖(I − ρW)y‖²`.
    pub fn profile_sigma2(&self, rho: T) -> Result<T> {
        check_rho(rho)?;
        let s: T = self
            .y
            .iter()
            .zip(self.wy.iter())
            .map(|(&y, &wy)| {
                let r = y - rho * wy;
                r * r
            })
            .sum();
        let s2 = s / T::from_count(self.n());
        if s2 > T::zero() && s2.is_finite() {
            Ok(s2)
        } else {
            Err(Error::DegenerateData)
        }
    }

    /// `ln|det(I − ρW)|`.
    pub fn log_det(&self, rho: T) -> Result<T> {
        check_rho(rho)?;
        match &self.eigvals {
            Some(eigs) => {
                let mut acc = T::zero();
                for &(re, im) in eigs {
                    let d2 = denom_sq(rho, re, im)?;
                    acc += d2.ln();
                }
                Ok(acc * T::lit(0.5))
            }
            None => lu_log_det(&self.w, rho),
        }
    }

    pub fn loglik(&self, rho: T) -> Result<T> {
        let s2 = self.profile_sigma2(rho)?;
        let ld = self.log_det(rho)?;
        let half_n = T::from_count(self.n()) * T::lit(0.5);
        Ok(-half_n * (T::two_pi().ln() + T::one()) - half_n * s2.ln() + ld)
    }

    pub fn score(&self, rho: T) -> Result<T> {
        let s2 = self.profile_sigma2(rho)?;
        let (t1, _) = self.traces(rho, false)?;
        Ok((self.b - rho * self.c) / s2 - t1)
    }

    pub fn hessian(&self, rho: T) -> Result<T> {
        let s2 = self.profile_sigma2(rho)?;
        let (_, t2) = self.traces(rho, true)?;
        let g = self.b - rho * self.c;
        let n = T::from_count(self.n());
        Ok(T::lit(2.0) * g * g / (n * s2 * s2) - self.c / s2 - t2)
    }

    /// `yᵀy`, `yᵀWy`, `‖Wy‖²`.
    pub fn quadratic_forms(&self) -> (T, T, T) {
        (self.a, self.b, self.c)
    }

    /// `tr{W(I − ρW)⁻¹}` and, if requested, `tr[{W(I − ρW)⁻¹}²]`.
    fn traces(&self, rho: T, second: bool) -> Result<(T, T)> {
        check_rho(rho)?;
        match &self.eigvals {
            Some(eigs) => {
                let mut t1 = T::zero();
                let mut t2 = T::zero();
                for &(re, im) in eigs {
                    let d2 = denom_sq(rho, re, im)?;
                    // λ/(1 − ρλ) = (Re λ − ρ|λ|² + i Im λ) / |1 − ρλ|²
                    let qr = (re - rho * (re * re + im * im)) / d2;
                    let qi = im / d2;
                    t1 += qr;
                    t2 += qr * qr - qi * qi;
                }
                Ok((t1, t2))
            }
            None => {
                let m = lu_m_matrix(&self.w, rho)?;
                let t1 = m.trace();
                let t2 = if second { (&m * &m).trace() } else { T::zero() };
                Ok((t1, t2))
            }
        }
    }
}

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if rho.abs() < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("|rho| must be < 1, got {}", rho.as_f64())))
    }
}

/// `|1 − ρλ|²`, rejecting near-singular factors.
fn denom_sq<T: Real>(rho: T, re: T, im: T) -> Result<T> {
    let dr = T::one() - rho * re;
    let di = rho * im;
    let d2 = dr * dr + di * di;
    if d2.sqrt() < T::lit(SINGULAR_GAP) {
        return Err(Error::Singularity { rho: rho.as_f64(), gap: d2.sqrt().as_f64() });
    }
    Ok(d2)
}

/// Complex spectrum of `w`, checked against the trace.
///
/// The strongly connected components of the sparsity pattern put `w` in
/// block-triangular form, so the spectrum is the union of the diagonal
/// blocks' spectra. Singleton blocks contribute their diagonal entry and the
/// rest go through a real Schur decomposition.
pub fn spectrum<T: Real>(w: &DMatrix<T>) -> Result<Vec<(T, T)>> {
    let n = w.nrows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n);
    let idx: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && w[(i, j)] != T::zero() {
                g.add_edge(idx[i], idx[j], ());
            }
        }
    }
    let mut eigs = Vec::with_capacity(n);
    for comp in kosaraju_scc(&g) {
        if let [v] = comp[..] {
            eigs.push((w[(v.index(), v.index())], T::zero()));
            continue;
        }
        let ids: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        let block = DMatrix::from_fn(ids.len(), ids.len(), |a, b| w[(ids[a], ids[b])]);
        eigs.extend(block_spectrum(block)?);
    }
    let sum: T = eigs.iter().map(|&(re, _)| re).sum();
    let tol = (T::default_epsilon().as_f64() * 1e8).max(1.0) * 1e-8 * n as f64;
    let gap = (sum - w.trace()).abs().as_f64();
    if gap > tol {
        return Err(Error::Fit(format!("eigenvalue sum misses trace by {gap:e}")));
    }
    Ok(eigs)
}

/// Real Schur spectrum of one irreducible block. Francis QR can stall on
/// cyclic (permutation-like) blocks, so failures are retried on a random
/// orthogonal similarity, which leaves the spectrum unchanged.
fn block_spectrum<T: Real>(block: DMatrix<T>) -> Result<Vec<(T, T)>> {
    let m = block.nrows();
    let max_iters = SCHUR_ITERS_PER_EIG * m.max(10);
    let eig = |b: DMatrix<T>| {
        Schur::try_new(b, T::default_epsilon(), max_iters)
            .map(|s| s.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect::<Vec<_>>())
    };
    if let Some(e) = eig(block.clone()) {
        return Ok(e);
    }
    for attempt in 0..SIMILARITY_RETRIES {
        let mut r = rng::substream(0x5eed, &[m as u64, attempt]);
        let g = DMatrix::<T>::from_fn(m, m, |_, _| T::lit(r.random::<f64>() - 0.5));
        let q = g.qr().q();
        if let Some(e) = eig(q.transpose() * &block * &q) {
            return Ok(e);
        }
    }
    Err(Error::Fit(format!("Schur decomposition of a {m}-node block did not converge")))
}

fn shifted<T: Real>(w: &DMatrix<T>, rho: T) -> DMatrix<T> {
    let n = w.nrows();
    DMatrix::identity(n, n) - w * rho
}

/// `ln|det(I − ρW)|` from the diagonal of an LU factor.
pub fn lu_log_det<T: Real>(w: &DMatrix<T>, rho: T) -> Result<T> {
    let lu = shifted(w, rho).lu();
    let u = lu.u();
    let mut acc = T::zero();
    for i in 0..u.nrows() {
        let d = u[(i, i)].abs();
        if d < T::lit(SINGULAR_GAP) {
            return Err(Error::Singularity { rho: rho.as_f64(), gap: d.as_f64() });
        }
        acc += d.ln();
    }
    Ok(acc)
}

/// `M = W(I − ρW)⁻¹ = (I − ρW)⁻¹W`.
pub fn lu_m_matrix<T: Real>(w: &DMatrix<T>, rho: T) -> Result<DMatrix<T>> {
    shifted(w, rho).lu().solve(w).ok_or(Error::Singularity { rho: rho.as_f64(), gap: 0.0 })
}
