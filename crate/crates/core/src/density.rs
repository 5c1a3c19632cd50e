//! Leading small-time density of the gBM time average and terminal value,
//! the Hartman-Watson integral, and the normalized marginal density `f₀`.
//!
//! All integrals are taken in log coordinates (`z = log ρ`, `u = log a`) with
//! the exponent kept in log form until the final sum, so small `t` does not
//! underflow.

use std::f64::consts::PI;

use thiserror::Error;

use crate::approx::{ApproxError, PiecewiseEvaluator, Target};
use crate::bessel::ln_bessel_k;
use crate::quadrature::{integrate, integrate_with_fallback, peak_window, QuadError, QuadratureSpec};

const HALF_PI_SQ: f64 = PI * PI / 2.0;
/// Exponent drop at which integrands are truncated.
const CUTOFF: f64 = 46.0;
const SCAN_POINTS: usize = 49;

/// Below this `t` the direct Hartman-Watson quadrature loses all digits to
/// cancellation in double precision.
pub const THETA_MIN_T: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("{what} requires a positive argument, got {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("no interior minimizer of I({a}, v) found for v in [{lo}, {hi}]")]
    Minimization { a: f64, lo: f64, hi: f64 },
    #[error("direct quadrature of the Hartman-Watson integral is unreliable for t = {t} < {threshold}; use the asymptotic method")]
    ThetaBelowThreshold { t: f64, threshold: f64 },
    #[error("Hartman-Watson quadrature unstable at t = {t} (relative change {rel_change:.3e} on node doubling); use the asymptotic method")]
    ThetaUnstable { t: f64, rel_change: f64 },
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn positive(what: &'static str, value: f64) -> Result<(), DensityError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(DensityError::Domain { what, value })
    }
}

/// Evaluators for `F` and `G` shared by every density computation.
#[derive(Clone, Debug)]
pub struct Evaluators {
    pub f: PiecewiseEvaluator,
    pub g: PiecewiseEvaluator,
}

impl Evaluators {
    pub fn new(order: usize, rho_range: (f64, f64)) -> Result<Self, ApproxError> {
        Ok(Evaluators {
            f: crate::approx::make_evaluator(Target::F, order, rho_range)?,
            g: crate::approx::make_evaluator(Target::G, order, rho_range)?,
        })
    }

    /// Order used by the pricer unless told otherwise.
    pub const DEFAULT_ORDER: usize = 40;
    /// Half width in `log ρ` of the default series window. Forty terms hold
    /// about 1e-13 on it; on the full `[0.04, 32.88]` window the tail of the
    /// series near the disk edge leaves errors of order 1e-5.
    pub const DEFAULT_LOG_HALF_WIDTH: f64 = 2.0;

    pub fn default_window() -> (f64, f64) {
        ((-Self::DEFAULT_LOG_HALF_WIDTH).exp(), Self::DEFAULT_LOG_HALF_WIDTH.exp())
    }

    pub fn standard() -> Result<Self, ApproxError> {
        Self::new(Self::DEFAULT_ORDER, Self::default_window())
    }

    /// `F(e^z) − π²/2`.
    fn f_shifted_log(&self, z: f64) -> Result<f64, ApproxError> {
        Ok(self.f.eval_log(z)? - HALF_PI_SQ)
    }

    fn ln_g_log(&self, z: f64) -> Result<f64, ApproxError> {
        Ok(self.g.eval_log(z)?.ln())
    }
}

/// `I(a, v) = (1 + v²)/(2a) + F(v/a) − π²/2`.
pub fn rate_i(a: f64, v: f64, f_eval: &PiecewiseEvaluator) -> Result<f64, DensityError> {
    positive("rate_I", a)?;
    positive("rate_I", v)?;
    Ok((1.0 + v * v) / (2.0 * a) + f_eval.eval_log(v.ln() - a.ln())? - HALF_PI_SQ)
}

/// Central-difference Hessian of `(x, y) ↦ I(e^x, e^y)`.
pub fn rate_i_log_hessian(x: f64, y: f64, step: f64, f_eval: &PiecewiseEvaluator) -> Result<[[f64; 2]; 2], DensityError> {
    let i = |dx: f64, dy: f64| rate_i((x + dx).exp(), (y + dy).exp(), f_eval);
    let h = step;
    let c = i(0.0, 0.0)?;
    let xx = (i(h, 0.0)? - 2.0 * c + i(-h, 0.0)?) / (h * h);
    let yy = (i(0.0, h)? - 2.0 * c + i(0.0, -h)?) / (h * h);
    let xy = (i(h, h)? - i(h, -h)? - i(-h, h)? + i(-h, -h)?) / (4.0 * h * h);
    Ok([[xx, xy], [xy, yy]])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateJ {
    pub value: f64,
    pub v_star: f64,
}

/// `J(a) = inf_v I(a, v)`, by a grid scan in `log v` followed by golden
/// section search.
pub fn rate_j(a: f64, f_eval: &PiecewiseEvaluator) -> Result<RateJ, DensityError> {
    positive("rate_J", a)?;
    let g = |y: f64| rate_i(a, y.exp(), f_eval);
    let (lo, hi) = (a.ln() - 4.0, a.ln() + 4.0);
    const GRID: usize = 81;
    let step = (hi - lo) / (GRID - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for i in 0..GRID {
        let v = g(lo + i as f64 * step)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == GRID - 1 {
        return Err(DensityError::Minimization { a, lo: lo.exp(), hi: hi.exp() });
    }
    let (y, value) = golden_max(|y| g(y).map(|v| -v), lo + (best.0 - 1) as f64 * step, lo + (best.0 + 1) as f64 * step, 1e-10)?;
    Ok(RateJ { value: -value, v_star: y.exp() })
}

/// Golden-section search for the maximum of a unimodal `f` on `[x0, x3]`.
fn golden_max(
    f: impl Fn(f64) -> Result<f64, DensityError>,
    mut x0: f64,
    mut x3: f64,
    tol: f64,
) -> Result<(f64, f64), DensityError> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = x3 - r * (x3 - x0);
    let mut x2 = x0 + r * (x3 - x0);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while x3 - x0 > tol {
        if f1 > f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - r * (x3 - x0);
            f1 = f(x1)?;
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + r * (x3 - x0);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (x0 + x3);
    Ok((x, f(x)?))
}

/// Leading-order joint density of `(A_t/t, V_t)` with respect to `da dv`:
/// `1/(2πt) v^μ e^{−μ²t/2} G(v/a) e^{−I(a,v)/t} / (a v)`.
pub fn joint_density_leading(a: f64, v: f64, t: f64, mu: f64, evals: &Evaluators) -> Result<f64, DensityError> {
    positive("joint density", t)?;
    let rate = rate_i(a, v, &evals.f)?;
    let z = v.ln() - a.ln();
    let log = mu * v.ln() - 0.5 * mu * mu * t + evals.ln_g_log(z)? - rate / t - a.ln() - v.ln();
    Ok(log.exp() / (2.0 * PI * t))
}

/// `ln ∫ exp(logf)` over `domain`. The peak is located by a grid scan of
/// `center ± half_width`, then the integral is truncated where `logf` has
/// dropped by [`CUTOFF`].
fn log_integral(
    logf: impl Fn(f64) -> Result<f64, DensityError>,
    center: f64,
    half_width: f64,
    scale: f64,
    domain: (f64, f64),
    quad: &QuadratureSpec,
) -> Result<f64, DensityError> {
    let (dlo, dhi) = domain;
    let (mut lo, mut hi) = ((center - half_width).max(dlo), (center + half_width).min(dhi));
    if lo >= hi {
        // the scan range misses the domain; look next to the nearest end
        if dlo >= center + half_width {
            lo = dlo;
            hi = (dlo + 2.0 * half_width).min(dhi);
        } else {
            hi = dhi;
            lo = (dhi - 2.0 * half_width).max(dlo);
        }
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..SCAN_POINTS {
        let v = logf(lo + i as f64 * step)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.1 == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    // the grid can miss a peak much narrower than `scale`
    let x0 = lo + best.0.saturating_sub(1) as f64 * step;
    let x3 = lo + (best.0 + 1).min(SCAN_POINTS - 1) as f64 * step;
    let best = match golden_max(&logf, x0, x3, 1e-4 * step) {
        Ok((x, v)) if v > best.1 => (x, v),
        _ => (lo + best.0 as f64 * step, best.1),
    };
    let peak = best.1;
    // errors inside the window search only end the search; they resurface
    // in the quadrature below
    let phi = |x: f64| {
        if x < dlo || x > dhi {
            return f64::INFINITY;
        }
        logf(x).map(|v| -v).unwrap_or(f64::NAN)
    };
    let (a, b) = peak_window(phi, best.0, scale, CUTOFF, 1e3 * half_width.max(scale));
    let (a, b) = (a.max(dlo), b.min(dhi));
    let failure = std::cell::RefCell::new(None);
    let integrand = |x: f64| match logf(x) {
        Ok(v) => (v - peak).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let est = integrate_with_fallback(integrand, a, b, quad);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(peak + est?.value.ln())
}

/// Weight `w(a)` in `∫ w(a) f₀(a) da/a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Moment {
    Mass,
    Mean,
    Call(f64),
    Put(f64),
}

impl Moment {
    /// `ln w(e^u)` and the admissible range of `u`.
    fn ln_weight(self, u: f64) -> f64 {
        match self {
            Moment::Mass => 0.0,
            Moment::Mean => u,
            Moment::Call(k) => k.ln() + (u - k.ln()).exp_m1().ln(),
            Moment::Put(k) => k.ln() + (-(u - k.ln()).exp_m1()).ln(),
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            Moment::Mass | Moment::Mean => (f64::NEG_INFINITY, f64::INFINITY),
            Moment::Call(k) => (k.ln(), f64::INFINITY),
            Moment::Put(k) => (f64::NEG_INFINITY, k.ln()),
        }
    }

    fn log_strike(self) -> f64 {
        match self {
            Moment::Call(k) | Moment::Put(k) => k.ln(),
            _ => 0.0,
        }
    }
}

/// Leading-order density at fixed `(τ, μ)` with its normalization `n(τ)`.
#[derive(Clone, Debug)]
pub struct ReducedDensity<'a> {
    tau: f64,
    mu: f64,
    norm: f64,
    evals: &'a Evaluators,
    quad: QuadratureSpec,
}

impl<'a> ReducedDensity<'a> {
    pub fn new(tau: f64, mu: f64, evals: &'a Evaluators, quad: &QuadratureSpec) -> Result<Self, DensityError> {
        let norm = norm_factor(tau, mu, evals, quad)?;
        Ok(ReducedDensity { tau, mu, norm, evals, quad: *quad })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `n(τ)` from the Bessel form of the mass integral.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn prefactor(&self) -> f64 {
        (-0.5 * self.mu * self.mu * self.tau).exp() / (2.0 * PI * self.tau)
    }

    /// `f₀(a)` with respect to `da/a`.
    pub fn f0(&self, a: f64) -> Result<f64, DensityError> {
        positive("f0 density", a)?;
        let (tau, mu) = (self.tau, self.mu);
        let logf = |z: f64| -> Result<f64, DensityError> {
            let rho = z.exp();
            let inner = (1.0 - a * rho).powi(2) / (2.0 * a);
            Ok(mu * z + self.evals.ln_g_log(z)? - (self.evals.f_shifted_log(z)? + rho + inner) / tau)
        };
        let scale = (tau / 3.0).sqrt();
        let ln_int = log_integral(logf, -0.5 * a.ln(), 12.0 * scale + a.ln().abs(), scale, (f64::NEG_INFINITY, f64::INFINITY), &self.quad)?;
        Ok(self.prefactor() * (mu * a.ln() + ln_int).exp() / self.norm)
    }

    /// `∫ w(a) f₀(a) da/a` before division by `n(τ)`, as a 2-D integral over
    /// `z = log ρ` (outer) and `u = log a` (inner).
    pub fn raw_moment(&self, moment: Moment) -> Result<f64, DensityError> {
        let (tau, mu) = (self.tau, self.mu);
        let quad = &self.quad;
        let inner = |z: f64| -> Result<f64, DensityError> {
            let logf = |u: f64| -> Result<f64, DensityError> {
                let phi_in = (-(u + z).exp_m1()).powi(2) * (-u).exp() / 2.0;
                Ok(mu * u + moment.ln_weight(u) - phi_in / tau)
            };
            let scale = (tau * (-z).exp()).sqrt();
            log_integral(logf, -z, 12.0 * scale, scale, moment.domain(), quad)
        };
        let outer = |z: f64| -> Result<f64, DensityError> {
            let rho = z.exp();
            let phi_out = self.evals.f_shifted_log(z)? + rho;
            let inner = inner(z)?;
            Ok(mu * z + self.evals.ln_g_log(z)? - phi_out / tau + inner)
        };
        let scale = (4.0 * tau / 3.0).sqrt();
        let ln_int = log_integral(outer, 0.0, 12.0 * scale + moment.log_strike().abs(), scale, (f64::NEG_INFINITY, f64::INFINITY), quad)?;
        Ok(self.prefactor() * ln_int.exp())
    }

    /// Normalized moment.
    pub fn moment(&self, moment: Moment) -> Result<f64, DensityError> {
        Ok(self.raw_moment(moment)? / self.norm)
    }
}

/// `n(τ) = e^{−μ²τ/2}/(πτ) ∫ G(ρ) K_μ(ρ/τ) e^{−(F(ρ)−π²/2)/τ} dρ/ρ`.
pub fn norm_factor(tau: f64, mu: f64, evals: &Evaluators, quad: &QuadratureSpec) -> Result<f64, DensityError> {
    positive("norm factor", tau)?;
    let logf = |z: f64| -> Result<f64, DensityError> {
        let ln_k = ln_bessel_k(mu, z.exp() / tau, quad)?;
        Ok(evals.ln_g_log(z)? - evals.f_shifted_log(z)? / tau + ln_k)
    };
    let scale = (tau / 3.0).sqrt();
    let ln_int = log_integral(logf, 0.0, 12.0 * scale, scale, (f64::NEG_INFINITY, f64::INFINITY), quad)?;
    Ok((ln_int - 0.5 * mu * mu * tau).exp() / (PI * tau))
}

/// `f₀(a, t)`; computes `n(t)` on every call, use [`ReducedDensity`] for
/// repeated evaluation.
pub fn f0_density(a: f64, t: f64, mu: f64, evals: &Evaluators, quad: &QuadratureSpec) -> Result<f64, DensityError> {
    ReducedDensity::new(t, mu, evals, quad)?.f0(a)
}

/// `(e^{(2μ+2)t} − 1)/((2μ+2)t)`, the mean of the time average.
pub fn exact_mean(t: f64, mu: f64) -> f64 {
    let x = (2.0 * mu + 2.0) * t;
    if x.abs() < 1e-12 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaProbe {
    pub value: f64,
    /// relative change of the last node doubling
    pub rel_change: f64,
    pub converged: bool,
}

/// Direct quadrature of `θ_r(t)` with no small-`t` guard.
pub fn theta_hw_unchecked(r: f64, t: f64, quad: &QuadratureSpec) -> Result<ThetaProbe, DensityError> {
    positive("theta r", r)?;
    positive("theta t", t)?;
    // e^{−ξ²/2t − r(cosh ξ − 1)} decides the range
    let phi = |x: f64| x * x / (2.0 * t) + 2.0 * r * (0.5 * x).sinh().powi(2);
    let (_, hi) = peak_window(phi, 0.0, t.sqrt().min(1.0), CUTOFF, 1e3);
    let integrand = |x: f64| (-phi(x)).exp() * x.sinh() * (PI * x / t).sin();
    let (value, change, converged) = match integrate(integrand, 0.0, hi, quad) {
        Ok(e) => (e.value, e.change, true),
        Err(QuadError::NotConverged { value, change, .. }) => (value, change, false),
        Err(e) => return Err(e.into()),
    };
    let ln_pre = r.ln() - 0.5 * (2.0 * PI.powi(3) * t).ln() + HALF_PI_SQ / t - r;
    let scaled = value.signum() * (ln_pre + value.abs().ln()).exp();
    let rel_change = if value == 0.0 { f64::INFINITY } else { change / value.abs() };
    Ok(ThetaProbe { value: scaled, rel_change, converged })
}

/// `θ_r(t) = r/√(2π³t) e^{π²/2t} ∫₀^∞ e^{−ξ²/2t} e^{−r cosh ξ} sinh ξ sin(πξ/t) dξ`.
/// Refuses `t <` [`THETA_MIN_T`].
pub fn theta_hw(r: f64, t: f64, quad: &QuadratureSpec) -> Result<f64, DensityError> {
    if t < THETA_MIN_T {
        return Err(DensityError::ThetaBelowThreshold { t, threshold: THETA_MIN_T });
    }
    let probe = theta_hw_unchecked(r, t, quad)?;
    if !probe.converged || probe.value <= 0.0 {
        return Err(DensityError::ThetaUnstable { t, rel_change: probe.rel_change });
    }
    Ok(probe.value)
}

/// Leading term `1/(2πt) e^{−(F(ρ)−π²/2)/t} G(ρ)` of `θ_{ρ/t}(t)`.
pub fn theta_asympt(rho: f64, t: f64, evals: &Evaluators) -> Result<f64, DensityError> {
    positive("theta rho", rho)?;
    positive("theta t", t)?;
    let z = rho.ln();
    Ok((evals.ln_g_log(z)? - evals.f_shifted_log(z)? / t).exp() / (2.0 * PI * t))
}
