//! Safeguarded Newton iteration on a sign-changing bracket.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSolverConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootSolverConfig {
    fn default() -> Self {
        RootSolverConfig { abs_tol: 1e-14, max_iter: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("no convergence after {iterations} iterations: last iterate {last}, residual {residual}")]
    NotConverged { last: f64, residual: f64, iterations: usize },
    #[error("non-finite function value at {x}")]
    NotFinite { x: f64 },
    #[error("invalid solver tolerance {0}")]
    BadTolerance(f64),
}

/// Root of `f` in `[lo, hi]`, where `f` returns `(value, derivative)` and
/// changes sign on the bracket.
///
/// Newton steps are taken when they stay strictly inside the current
/// bracket and shrink it fast enough; otherwise the bracket is bisected.
/// Converges when the step (or the bracket) falls below
/// `abs_tol·max(1, |x|)` or the residual is exactly zero.
pub fn newton_bisect<T: Real>(
    f: impl Fn(T) -> (T, T),
    lo: T,
    hi: T,
    cfg: &RootSolverConfig,
) -> Result<T, RootError> {
    if !(cfg.abs_tol > 0.0) {
        return Err(RootError::BadTolerance(cfg.abs_tol));
    }
    let tol = T::lit(cfg.abs_tol);
    let two = T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    let to64 = |x: T| x.to_f64().unwrap_or(f64::NAN);
    if !fa.is_finite() {
        return Err(RootError::NotFinite { x: to64(a) });
    }
    if !fb.is_finite() {
        return Err(RootError::NotFinite { x: to64(b) });
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(RootError::NoSignChange { lo: to64(a), hi: to64(b), f_lo: to64(fa), f_hi: to64(fb) });
    }
    // orient so that f(a) < 0 < f(b)
    if fa > T::zero() {
        std::mem::swap(&mut a, &mut b);
    }

    let mut x = (a + b) / two;
    let mut fx = T::zero();
    let mut last_step = (b - a).abs();
    for _ in 0..cfg.max_iter {
        let (v, d) = f(x);
        if !v.is_finite() {
            return Err(RootError::NotFinite { x: to64(x) });
        }
        fx = v;
        if v == T::zero() {
            return Ok(x);
        }
        if v < T::zero() {
            a = x;
        } else {
            b = x;
        }
        let scale = tol * x.abs().max(T::one());
        if (b - a).abs() <= scale {
            return Ok(x);
        }
        // Newton only while it stays in the bracket and at least halves the
        // step, as in rtsafe
        let newton = x - v / d;
        let accept = d != T::zero()
            && newton.is_finite()
            && (newton - a) * (newton - b) < T::zero()
            && (newton - x).abs() * two <= last_step;
        let next = if accept { newton } else { (a + b) / two };
        last_step = (next - x).abs();
        x = next;
        if last_step <= scale {
            // one more Newton step recovers the digits the step test gives away
            let (v, d) = f(x);
            let polished = x - v / d;
            let inside = (polished - a) * (polished - b) <= T::zero();
            return Ok(if d != T::zero() && polished.is_finite() && inside { polished } else { x });
        }
    }
    Err(RootError::NotConverged { last: to64(x), residual: to64(fx), iterations: cfg.max_iter })
}
