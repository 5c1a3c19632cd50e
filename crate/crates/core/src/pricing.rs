//! Leading-order Asian call and put prices in the Black-Scholes model.
//!
//! A scenario `(S₀, r, σ, T, K)` maps to reduced parameters `τ = σ²T/4`,
//! `μ = 2r/σ² − 1`, `k = K/S₀`, and `C_A = e^{−rT} S₀ c_A(k, τ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{DensityError, Evaluators, Moment, ReducedDensity};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("scenario field {field} must be positive, got {value}")]
    InvalidScenario { field: &'static str, value: f64 },
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("could not build the worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "S0")]
    pub s0: f64,
    pub r: f64,
    pub sigma: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), PricingError> {
        for (field, value) in [("S0", self.s0), ("r", self.r), ("sigma", self.sigma), ("T", self.t), ("K", self.k)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(PricingError::InvalidScenario { field, value });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub tau: f64,
    pub mu: f64,
    pub k: f64,
}

impl From<&Scenario> for ReducedParams {
    fn from(s: &Scenario) -> Self {
        ReducedParams {
            tau: s.sigma * s.sigma * s.t / 4.0,
            mu: 2.0 * s.r / (s.sigma * s.sigma) - 1.0,
            k: s.k / s.s0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceResult {
    /// `c_A(k, τ)` before normalization
    pub c_reduced: f64,
    /// `n(τ)`
    pub norm: f64,
    /// `e^{−rT} S₀ c_A / n(τ)`
    pub price: f64,
    /// `e^{−rT} S₀ c_A`
    pub price_raw: f64,
    pub put_price: Option<f64>,
}

/// Unnormalized reduced call `∫_k^∞ (a − k) f₀(a) da/a` times `n(τ)`.
pub fn price_call_reduced(k: f64, tau: f64, mu: f64, evals: &Evaluators, quad: &QuadratureSpec) -> Result<f64, PricingError> {
    let density = ReducedDensity::new(tau, mu, evals, quad)?;
    Ok(density.raw_moment(Moment::Call(k))?)
}

/// Unnormalized reduced put `∫_0^k (k − a) f₀(a) da/a` times `n(τ)`.
pub fn price_put_reduced(k: f64, tau: f64, mu: f64, evals: &Evaluators, quad: &QuadratureSpec) -> Result<f64, PricingError> {
    let density = ReducedDensity::new(tau, mu, evals, quad)?;
    Ok(density.raw_moment(Moment::Put(k))?)
}

pub fn price_scenario(s: &Scenario, evals: &Evaluators, quad: &QuadratureSpec) -> Result<PriceResult, PricingError> {
    s.validate()?;
    let p = ReducedParams::from(s);
    let density = ReducedDensity::new(p.tau, p.mu, evals, quad)?;
    let call = density.raw_moment(Moment::Call(p.k))?;
    let put = density.raw_moment(Moment::Put(p.k))?;
    let norm = density.norm();
    let scale = (-s.r * s.t).exp() * s.s0;
    Ok(PriceResult {
        c_reduced: call,
        norm,
        price: scale * call / norm,
        price_raw: scale * call,
        put_price: Some(scale * put / norm),
    })
}

/// Prices every scenario, using at most `threads` workers (all cores when
/// `None`). Results keep the input order.
pub fn price_batch(
    scenarios: &[Scenario],
    evals: &Evaluators,
    quad: &QuadratureSpec,
    threads: Option<usize>,
) -> Result<Vec<PriceResult>, PricingError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| PricingError::Pool(e.to_string()))?;
    pool.install(|| scenarios.par_iter().map(|s| price_scenario(s, evals, quad)).collect())
}

/// The seven benchmark scenarios, all struck at `K = 2`.
pub fn table3() -> Vec<Scenario> {
    [
        (2.0, 0.02, 0.10, 1.0),
        (2.0, 0.18, 0.30, 1.0),
        (2.0, 0.0125, 0.25, 2.0),
        (1.9, 0.05, 0.50, 1.0),
        (2.0, 0.05, 0.50, 1.0),
        (2.1, 0.05, 0.50, 1.0),
        (2.0, 0.05, 0.50, 2.0),
    ]
    .into_iter()
    .map(|(s0, r, sigma, t)| Scenario { s0, r, sigma, t, k: 2.0 })
    .collect()
}
