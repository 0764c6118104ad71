//! Error draws and SAR responses `Y = (I − ρW)⁻¹ E` by truncated Neumann
//! series `Σ_{k≤m} ρᵏ Wᵏ E`, one sparse product per term.

use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::WeightMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ErrorDist {
    /// Standard normal.
    Norm,
    /// Standard exponential shifted to mean zero (variance 1, `μ₄ = 9`).
    Exp,
}

impl ErrorDist {
    /// Fourth moment of the unit-variance error.
    pub fn fourth_moment(self) -> f64 {
        match self {
            ErrorDist::Norm => 3.0,
            ErrorDist::Exp => 9.0,
        }
    }
}

impl FromStr for ErrorDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NORM" | "NORMAL" => Ok(ErrorDist::Norm),
            "EXP" => Ok(ErrorDist::Exp),
            _ => Err(Error::Config(format!("unknown error distribution {s:?}"))),
        }
    }
}

fn default_tol() -> f64 {
    1e-10
}
fn default_m_cap() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub rho: f64,
    pub error_dist: ErrorDist,
    #[serde(default = "default_tol")]
    pub neumann_tol: f64,
    #[serde(default = "default_m_cap")]
    pub m_cap: usize,
    #[serde(default)]
    pub seed: u64,
}

impl DgpConfig {
    pub fn new(rho: f64, error_dist: ErrorDist) -> Self {
        Self { rho, error_dist, neumann_tol: default_tol(), m_cap: default_m_cap(), seed: 0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho.abs() < 1.0) {
            return Err(Error::Config(format!("|rho| must be < 1, got {}", self.rho)));
        }
        if !(self.neumann_tol > 0.0) {
            return Err(Error::Config("neumann_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector<T = f64> {
    pub y: Vec<T>,
    /// Highest power `m` included in the series.
    pub truncation_m: usize,
    /// The tail bound was still above tolerance when `m_cap` was reached.
    pub hit_cap: bool,
}

/// `n` i.i.d. unit-variance, mean-zero errors.
pub fn draw_errors<T: Real, R: Rng + ?Sized>(dist: ErrorDist, n: usize, rng: &mut R) -> Vec<T> {
    (0..n)
        .map(|_| {
            let e: f64 = match dist {
                ErrorDist::Norm => StandardNormal.sample(rng),
                ErrorDist::Exp => {
                    let x: f64 = Exp1.sample(rng);
                    x - 1.0
                }
            };
            T::lit(e)
        })
        .collect()
}

/// Accumulates `y ← y + ρᵏ Wᵏ E` and stops at the first `m` with
/// `|ρ|^{m+1} ‖E‖_∞ / (1 − |ρ|) < tol`, the tail bound for a matrix whose
/// rows sum to at most one.
pub fn gen_response<T: Real>(w: &WeightMatrix<T>, cfg: &DgpConfig, errors: &[T]) -> Result<ResponseVector<T>> {
    cfg.validate()?;
    if errors.len() != w.n_nodes() {
        return Err(Error::Domain(format!("{} errors for {} nodes", errors.len(), w.n_nodes())));
    }
    let rho = T::lit(cfg.rho);
    let abs_rho = cfg.rho.abs();
    let e_max = errors.iter().fold(0.0f64, |m, e| m.max(e.as_f64().abs()));
    let tail = |m: usize| abs_rho.powi(m as i32 + 1) / (1.0 - abs_rho) * e_max;

    let mut y = errors.to_vec();
    let mut term = errors.to_vec();
    let mut next = vec![T::zero(); errors.len()];
    let mut m = 0;
    let mut hit_cap = false;
    while tail(m) >= cfg.neumann_tol {
        if m >= cfg.m_cap {
            hit_cap = true;
            log::warn!("Neumann series stopped at m_cap = {} (tail bound {:e})", cfg.m_cap, tail(m));
            break;
        }
        w.spmv_into(&term, &mut next)?;
        for (t, &v) in term.iter_mut().zip(&next) {
            *t = rho * v;
        }
        for (yi, &t) in y.iter_mut().zip(&term) {
            *yi += t;
        }
        m += 1;
    }
    Ok(ResponseVector { y, truncation_m: m, hit_cap })
}

/// Draws errors from `cfg.seed` and returns `(errors, response)`.
pub fn simulate<T: Real>(w: &WeightMatrix<T>, cfg: &DgpConfig) -> Result<(Vec<T>, ResponseVector<T>)> {
    let mut r = crate::rng::from_seed(cfg.seed);
    let errors = draw_errors(cfg.error_dist, w.n_nodes(), &mut r);
    let y = gen_response(w, cfg, &errors)?;
    Ok((errors, y))
}

/// One value per line with 17 significant digits.
pub fn write_vector<W: Write>(values: &[f64], mut out: W) -> Result<()> {
    for v in values {
        writeln!(out, "{v:.16e}")?;
    }
    Ok(())
}

pub fn read_vector<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        values.push(
            t.parse::<f64>().map_err(|e| Error::Parse { line: idx + 1, msg: format!("invalid number {t:?}: {e}") })?,
        );
    }
    Ok(values)
}
