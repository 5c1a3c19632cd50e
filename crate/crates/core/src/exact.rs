//! Closed-form evaluation of `F`, `G` and `J_BS` through the transcendental
//! equations that define them, and the critical points of `sinh√z/√z`.
//!
//! All solvers work on logarithms of `sinh κ/κ` and `sin m/m`, which keeps
//! the residual well scaled for tiny and huge `ρ` alike. For `ρ > 1` the
//! root `λ ∈ (0, π)` of `λ + ρ sin λ = π` is handled through `m = π − λ`,
//! which solves `ρ sin m = m`; this avoids the cancellation in `1 + ρ cos λ`
//! close to `ρ = 1`.

use std::sync::OnceLock;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::{newton_bisect, RootError, RootSolverConfig};
use crate::scalar::Real;
use crate::series::families;
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Below this `|log ρ|` the expansions at `ρ = 1` are used.
pub const NEAR_ONE_LOG: f64 = 1e-3;

/// Order of the expansions used by the near-one guard.
const NEAR_ONE_ORDER: usize = 16;

struct NearOne {
    f: Vec<f64>,
    g: Vec<f64>,
    jbs: Vec<f64>,
}

fn near_one() -> &'static NearOne {
    static TABLE: OnceLock<NearOne> = OnceLock::new();
    TABLE.get_or_init(|| {
        let conv = |s: Series<BigRational>| s.to_f64_coeffs();
        NearOne {
            f: conv(families::coeffs_f(NEAR_ONE_ORDER).expect("valid order")),
            g: conv(families::coeffs_g(NEAR_ONE_ORDER).expect("valid order")),
            jbs: conv(families::coeffs_jbs(NEAR_ONE_ORDER, families::Variable::Log).expect("valid order")),
        }
    })
}

fn horner<T: Real>(coeffs: &[f64], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + T::lit(c))
}

/// `ln(sinh x/x)` and its derivative `coth x − 1/x`, for `x ≥ 0`.
fn ln_sinhc<T: Real>(x: T) -> (T, T) {
    let half = T::lit(0.5);
    if x < half {
        // Σ_{n≥1} x^{2n}/(2n+1)! has no cancellation
        let x2 = x * x;
        let mut term = x2 / T::lit(6.0);
        let mut sum = term;
        for n in 2..12 {
            term = term * x2 / T::lit(((2 * n) * (2 * n + 1)) as f64);
            sum = sum + term;
        }
        (sum.ln_1p(), x_coth_minus_one(x) / x)
    } else if x < T::lit(20.0) {
        ((x.sinh() / x).ln(), T::one() / x.tanh() - T::one() / x)
    } else {
        let e = (-(x + x)).exp();
        (x - T::LN_2() - x.ln() + (-e).ln_1p(), T::one() / x.tanh() - T::one() / x)
    }
}

/// `ln(sin x/x)` and its derivative `cot x − 1/x`, for `0 ≤ x < π`.
fn ln_sinc<T: Real>(x: T) -> (T, T) {
    if x < T::lit(0.5) {
        let x2 = x * x;
        let mut term = -x2 / T::lit(6.0);
        let mut sum = term;
        for n in 2..12 {
            term = -term * x2 / T::lit(((2 * n) * (2 * n + 1)) as f64);
            sum = sum + term;
        }
        (sum.ln_1p(), -one_minus_x_cot(x) / x)
    } else {
        ((x.sin() / x).ln(), x.cos() / x.sin() - T::one() / x)
    }
}

/// `x·coth x − 1`, accurate near 0.
fn x_coth_minus_one<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.25) {
        // Σ 2^{2n} B_{2n} x^{2n}/(2n)!, n ≥ 1
        const C: [f64; 8] = [
            1.0 / 3.0,
            -1.0 / 45.0,
            2.0 / 945.0,
            -1.0 / 4725.0,
            2.0 / 93555.0,
            -1382.0 / 638512875.0,
            4.0 / 18243225.0,
            -3617.0 / 162820783125.0,
        ];
        let x2 = x * x;
        x2 * horner(&C, x2)
    } else {
        x / x.tanh() - T::one()
    }
}

/// `1 − x·cot x`, accurate near 0.
fn one_minus_x_cot<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.25) {
        const C: [f64; 8] = [
            1.0 / 3.0,
            1.0 / 45.0,
            2.0 / 945.0,
            1.0 / 4725.0,
            2.0 / 93555.0,
            1382.0 / 638512875.0,
            4.0 / 18243225.0,
            3617.0 / 162820783125.0,
        ];
        let x2 = x * x;
        x2 * horner(&C, x2)
    } else {
        T::one() - x * x.cos() / x.sin()
    }
}

/// `x − tanh x`, accurate near 0.
fn x_minus_tanh<T: Real>(x: T) -> T {
    if x.abs() < T::lit(0.25) {
        const C: [f64; 7] = [
            1.0 / 3.0,
            -2.0 / 15.0,
            17.0 / 315.0,
            -62.0 / 2835.0,
            1382.0 / 155925.0,
            -21844.0 / 6081075.0,
            929569.0 / 638512875.0,
        ];
        let x2 = x * x;
        x * x2 * horner(&C, x2)
    } else {
        x - x.tanh()
    }
}

/// Solves `ln(sinh ξ/ξ) = target` for `ξ ≥ 0`, `target ≥ 0`.
fn inverse_ln_sinhc<T: Real>(target: T, cfg: &RootSolverConfig) -> Result<T, RootError> {
    if target <= T::zero() {
        return Ok(T::zero());
    }
    // ln(sinh ξ/ξ) ≈ ξ − ln(2ξ) for large ξ, ≈ ξ²/6 for small ξ
    let mut hi = (T::lit(6.0) * target).sqrt().max(target + T::lit(2.0) * (target + T::one()).ln() + T::one());
    while ln_sinhc(hi).0 < target {
        hi = hi + hi;
    }
    newton_bisect(|x| { let (v, d) = ln_sinhc(x); (v - target, d) }, T::zero(), hi, cfg)
}

/// Solves `ln(sin m/m) = target` for `m ∈ [0, π)`, `target ≤ 0`.
fn inverse_ln_sinc<T: Real>(target: T, cfg: &RootSolverConfig) -> Result<T, RootError> {
    if target >= T::zero() {
        return Ok(T::zero());
    }
    let pi = T::PI();
    // (π − m)/π ≤ sin m/m ≤ (π − m)/m on (0, π) brackets the root
    let inv_rho = target.exp();
    let lo = -pi * target.exp_m1();
    let hi = pi / (T::one() + inv_rho);
    newton_bisect(|x| { let (v, d) = ln_sinc(x); (v - target, d) }, lo, hi, cfg)
}

fn check_positive<T: Real>(x: T, what: &'static str) -> Result<(), ExactError> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(ExactError::Domain { what, value: x.to_f64().unwrap_or(f64::NAN) })
    }
}

/// `κ ≥ 0` with `ρ sinh κ/κ = 1`, `0 < ρ < 1`.
pub fn solve_kappa<T: Real>(rho: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    check_positive(rho, "solve_kappa")?;
    if rho >= T::one() {
        return Err(ExactError::Domain { what: "solve_kappa", value: rho.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(inverse_ln_sinhc(-rho.ln(), cfg)?)
}

/// `λ ∈ (0, π)` with `λ + ρ sin λ = π`, `ρ > 1`.
pub fn solve_lambda<T: Real>(rho: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    Ok(T::PI() - solve_m(rho, cfg)?)
}

/// `m = π − λ ∈ (0, π)`, the root of `ρ sin m = m`.
pub fn solve_m<T: Real>(rho: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    check_positive(rho, "solve_lambda")?;
    if rho <= T::one() {
        return Err(ExactError::Domain { what: "solve_lambda", value: rho.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(inverse_ln_sinc(-rho.ln(), cfg)?)
}

/// `ξ ≥ 0` with `sinh ξ/ξ = x`, `x ≥ 1`.
pub fn solve_xi<T: Real>(x: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    if !(x >= T::one()) || !x.is_finite() {
        return Err(ExactError::Domain { what: "solve_xi", value: x.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(inverse_ln_sinhc(x.ln(), cfg)?)
}

/// `ζ ∈ [0, π)` with `sin ζ/ζ = x`, `0 < x ≤ 1`.
pub fn solve_zeta<T: Real>(x: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    if !(x > T::zero() && x <= T::one()) {
        return Err(ExactError::Domain { what: "solve_zeta", value: x.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(inverse_ln_sinc(x.ln(), cfg)?)
}

/// `F(ρ)`: `κ²/2 − κ coth κ + π²/2` for `ρ < 1`,
/// `π²/2 − m²/2 − m cot m` for `ρ > 1`.
pub fn f_exact<T: Real>(rho: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    check_positive(rho, "F")?;
    let s = rho.ln();
    let half_pi_sq = T::lit(0.5) * T::PI() * T::PI();
    let half = T::lit(0.5);
    if s.abs() < T::lit(NEAR_ONE_LOG) {
        return Ok(half_pi_sq + horner(&near_one().f, s));
    }
    if s < T::zero() {
        let k = inverse_ln_sinhc(-s, cfg)?;
        Ok(half * k * k - T::one() - x_coth_minus_one(k) + half_pi_sq)
    } else {
        let m = inverse_ln_sinc(-s, cfg)?;
        Ok(half_pi_sq - half * m * m - T::one() + one_minus_x_cot(m))
    }
}

/// `G(ρ)`: `κ/√(κ coth κ − 1)` for `ρ < 1`, `m/√(1 − m cot m)` for `ρ > 1`.
pub fn g_exact<T: Real>(rho: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    check_positive(rho, "G")?;
    let s = rho.ln();
    if s.abs() < T::lit(NEAR_ONE_LOG) {
        return Ok(T::lit(3.0).sqrt() * horner(&near_one().g, s));
    }
    if s < T::zero() {
        let k = inverse_ln_sinhc(-s, cfg)?;
        Ok(k / x_coth_minus_one(k).sqrt())
    } else {
        let m = inverse_ln_sinc(-s, cfg)?;
        Ok(m / one_minus_x_cot(m).sqrt())
    }
}

/// `J_BS(x)`: `ξ²/2 − ξ tanh(ξ/2)` for `x ≥ 1`, `ζ tan(ζ/2) − ζ²/2` for
/// `x < 1`.
pub fn jbs_exact<T: Real>(x: T, cfg: &RootSolverConfig) -> Result<T, ExactError> {
    check_positive(x, "J_BS")?;
    let y = x.ln();
    let two = T::lit(2.0);
    if y.abs() < T::lit(NEAR_ONE_LOG) {
        return Ok(horner(&near_one().jbs, y));
    }
    if y > T::zero() {
        let xi = inverse_ln_sinhc(y, cfg)?;
        Ok(xi * x_minus_tanh(xi / two))
    } else {
        let z = inverse_ln_sinc(y, cfg)?;
        let h = z / two;
        Ok(z * (h.tan() - h))
    }
}

/// One critical point of `sinh√z/√z`: `tan η = η`, `z = −η²`,
/// `ω = sin η/η`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub k: usize,
    pub eta: f64,
    pub z: f64,
    pub omega: f64,
    /// `|Log ω_k|`, principal branch: `|ln|ω_k| + iπ|` for odd `k`.
    pub abs_log_omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointTable {
    pub entries: Vec<CriticalPoint>,
    /// `|ln|ω₁| + iπ|`
    pub rho_x: f64,
    /// `arg(ln|ω₁| + iπ)`
    pub theta_x: f64,
}

/// `η_k ∈ (kπ, kπ + π/2)` solving `tan η = η`.
pub fn eta_k(k: usize, cfg: &RootSolverConfig) -> Result<f64, ExactError> {
    if k == 0 {
        return Err(ExactError::Domain { what: "eta_k", value: 0.0 });
    }
    let lo = k as f64 * std::f64::consts::PI;
    let hi = lo + std::f64::consts::FRAC_PI_2;
    // η cos η − sin η changes sign on the bracket and has no pole
    Ok(newton_bisect(|x: f64| (x * x.cos() - x.sin(), -x * x.sin()), lo, hi, cfg)?)
}

pub fn critical_points(count: usize, cfg: &RootSolverConfig) -> Result<CriticalPointTable, ExactError> {
    let count = count.max(1);
    let mut entries = Vec::with_capacity(count);
    for k in 1..=count {
        let eta = eta_k(k, cfg)?;
        let omega = eta.sin() / eta;
        let ln_abs = omega.abs().ln();
        let abs_log_omega = if omega < 0.0 { ln_abs.hypot(std::f64::consts::PI) } else { ln_abs.abs() };
        entries.push(CriticalPoint { k, eta, z: -eta * eta, omega, abs_log_omega });
    }
    let ln1 = entries[0].omega.abs().ln();
    Ok(CriticalPointTable {
        rho_x: ln1.hypot(std::f64::consts::PI),
        theta_x: std::f64::consts::PI.atan2(ln1),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RootSolverConfig {
        RootSolverConfig::default()
    }

    #[test]
    fn helper_series_match_direct_formulas() {
        for &x in &[0.1f64, 0.2, 0.249] {
            assert!((x_coth_minus_one(x) - (x / x.tanh() - 1.0)).abs() < 1e-15);
            assert!((one_minus_x_cot(x) - (1.0 - x / x.tan())).abs() < 1e-15);
            assert!((x_minus_tanh(x * 0.5) - (x * 0.5 - (x * 0.5).tanh())).abs() < 1e-16);
        }
    }

    #[test]
    fn kappa_and_m_residuals() {
        for &rho in &[1e-8f64, 0.01, 0.5, 0.999] {
            let k = solve_kappa(rho, &cfg()).unwrap();
            assert!((rho * k.sinh() / k - 1.0).abs() < 1e-12, "rho {rho}");
        }
        for &rho in &[1.001f64, 2.0, 30.0, 1e6] {
            let lam = solve_lambda(rho, &cfg()).unwrap();
            assert!((lam + rho * lam.sin() - std::f64::consts::PI).abs() < 1e-12 * rho.max(1.0));
        }
    }

    #[test]
    fn domain_errors() {
        assert!(solve_kappa(1.5f64, &cfg()).is_err());
        assert!(solve_lambda(0.5f64, &cfg()).is_err());
        assert!(f_exact(-1.0f64, &cfg()).is_err());
        assert!(solve_zeta(1.5f64, &cfg()).is_err());
    }

    #[test]
    fn values_at_one() {
        let pi2 = std::f64::consts::PI.powi(2) / 2.0;
        assert!((f_exact(1.0f64, &cfg()).unwrap() - (pi2 - 1.0)).abs() < 1e-15);
        assert!((g_exact(1.0f64, &cfg()).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(jbs_exact(1.0f64, &cfg()).unwrap(), 0.0);
        assert_eq!(solve_xi(1.0f64, &cfg()).unwrap(), 0.0);
        assert_eq!(solve_zeta(1.0f64, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn generic_over_f32() {
        let v = f_exact(0.5f32, &RootSolverConfig { abs_tol: 1e-6, max_iter: 100 }).unwrap();
        let w = f_exact(0.5f64, &cfg()).unwrap();
        assert!((v as f64 - w).abs() < 1e-4);
    }
}
