use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::qmle::{self, FitOptions, FitResult, LikelihoodWorkspace};
use crate::scalar::Real;

/// Variance assembly for the plug-in standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SeVariant {
    /// Kurtosis-normalised terms of the centred quadratic form.
    #[default]
    Lemma2,
    /// The asymptotic-variance expression exactly as printed, with `μ₄/σ²`
    /// and an unscaled diagonal term.
    Thm1Literal,
}

impl FromStr for SeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "LEMMA2" => Ok(SeVariant::Lemma2),
            "THM1_LITERAL" => Ok(SeVariant::Thm1Literal),
            _ => Err(Error::Config(format!("unknown SE variant {s:?}"))),
        }
    }
}

/// Traces of `M = W11(I − ρ̂W11)⁻¹` and residual moments.
#[derive(Debug, Clone)]
pub struct SeIngredients<T: Real = f64> {
    pub m_s: DMatrix<T>,
    pub n: usize,
    pub tr_m: T,
    /// `tr(M²)`
    pub tr_m2: T,
    /// `tr(MᵀM)`
    pub tr_mtm: T,
    /// `Σ M_ii²`
    pub tr_diag2: T,
    pub mu4_hat: T,
    pub sigma2_hat: T,
}

pub fn se_ingredients<T: Real>(rho_hat: T, sigma2_hat: T, y1: &[T], w11: &DMatrix<T>) -> Result<SeIngredients<T>> {
    let n = y1.len();
    if w11.nrows() != n || w11.ncols() != n {
        return Err(Error::Domain(format!("W11 is {}x{}, y1 has length {n}", w11.nrows(), w11.ncols())));
    }
    if !(rho_hat.abs() < T::one()) {
        return Err(Error::Domain(format!("|rho_hat| must be < 1, got {}", rho_hat.as_f64())));
    }
    let m = qmle::lu_m_matrix(w11, rho_hat)?;
    let mut tr_m = T::zero();
    let mut tr_m2 = T::zero();
    let mut tr_mtm = T::zero();
    let mut tr_diag2 = T::zero();
    for i in 0..n {
        let d = m[(i, i)];
        tr_m += d;
        tr_diag2 += d * d;
        for j in 0..n {
            let v = m[(i, j)];
            tr_mtm += v * v;
            tr_m2 += v * m[(j, i)];
        }
    }
    let y = DVector::from_column_slice(y1);
    let resid = &y - (w11 * &y) * rho_hat;
    let mu4_hat = resid.iter().map(|&e| e * e * e * e).sum::<T>() / T::from_count(n);
    Ok(SeIngredients { m_s: m, n, tr_m, tr_m2, tr_mtm, tr_diag2, mu4_hat, sigma2_hat })
}

/// `(σ²₁, σ²₂)`: score variance and sign-normalised curvature.
pub fn variance_components<T: Real>(ing: &SeIngredients<T>, variant: SeVariant) -> (T, T) {
    let n = T::from_count(ing.n);
    let t = ing.tr_m;
    let common = ing.tr_mtm / n + ing.tr_m2 / n;
    let s2 = (common - T::lit(2.0) * t * t / (n * n)).abs();
    let s1 = match variant {
        SeVariant::Lemma2 => {
            let kurt = ing.mu4_hat / (ing.sigma2_hat * ing.sigma2_hat);
            // Σ(M_ii − t/n)² = Σ M_ii² − t²/n
            let centred_diag = ing.tr_diag2 - t * t / n;
            (kurt - T::lit(3.0)) * centred_diag / n + common - T::lit(2.0) * t * t / (n * n)
        }
        SeVariant::Thm1Literal => {
            let r = ing.mu4_hat / ing.sigma2_hat;
            (T::one() - r) * t * t / (n * n) + common + (r - T::lit(3.0)) * ing.tr_diag2
        }
    };
    (s1, s2)
}

/// `σ₁ / (σ²₂ √n)`.
pub fn plugin_se<T: Real>(ing: &SeIngredients<T>, variant: SeVariant) -> Result<T> {
    let (s1, s2) = variance_components(ing, variant);
    if !(s2 >= T::lit(1e-12)) {
        return Err(Error::DegenerateCurvature(s2.as_f64()));
    }
    if !(s1 >= T::zero()) {
        return Err(Error::NegativeVariance(s1.as_f64()));
    }
    Ok(s1.sqrt() / (s2 * T::from_count(ing.n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalResult {
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub level: f64,
}

impl IntervalResult {
    /// Closed-interval membership.
    pub fn covers(&self, rho: f64) -> bool {
        self.ci_lo <= rho && rho <= self.ci_hi
    }
}

/// `ρ̂ ± z_{(1+level)/2} · se`.
pub fn confidence_interval(rho_hat: f64, se: f64, level: f64) -> Result<IntervalResult> {
    if !(se >= 0.0) {
        return Err(Error::Domain(format!("standard error must be >= 0, got {se}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {level}")));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    Ok(IntervalResult { se, ci_lo: rho_hat - z * se, ci_hi: rho_hat + z * se, level })
}

/// Fit plus plug-in interval for one subnetwork.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub fit: FitResult<f64>,
    pub interval: IntervalResult,
}

pub fn estimate<T: Real>(
    y1: &[T],
    w11: &DMatrix<T>,
    opts: &FitOptions,
    variant: SeVariant,
    level: f64,
) -> Result<Estimate> {
    let ws = LikelihoodWorkspace::new(w11.clone(), y1)?;
    let fit = qmle::fit_workspace(&ws, opts)?;
    let ing = se_ingredients(fit.rho_hat, fit.sigma2_hat, y1, w11)?;
    let se = plugin_se(&ing, variant)?.as_f64();
    let fit = FitResult {
        rho_hat: fit.rho_hat.as_f64(),
        sigma2_hat: fit.sigma2_hat.as_f64(),
        loglik: fit.loglik.as_f64(),
        iterations: fit.iterations,
        converged: fit.converged,
        used_fallback: fit.used_fallback,
    };
    let interval = confidence_interval(fit.rho_hat, se, level)?;
    Ok(Estimate { fit, interval })
}
