//! Modified Bessel function of the second kind from
//! `K_ν(x) = ∫₀^∞ e^{−x cosh u} cosh(νu) du`, evaluated in log form.
//!
//! With `ψ(u) = |ν|u − x(cosh u − 1)` the integrand is
//! `e^{−x} e^{ψ(u)} (1 + e^{−2|ν|u})/2`. `ψ` is concave with its maximum at
//! `u* = asinh(|ν|/x)`, so the integral is taken over a window around `u*`
//! after factoring out `e^{ψ(u*)}`. Nothing overflows for large `x`.

use crate::quadrature::{integrate, peak_window, QuadError, QuadratureSpec};

/// Exponent drop at which the integrand is cut off.
const CUTOFF: f64 = 46.0;

/// `ln K_ν(x)` for `x > 0`.
pub fn ln_bessel_k(nu: f64, x: f64, quad: &QuadratureSpec) -> Result<f64, QuadError> {
    if !(x > 0.0) || !x.is_finite() || !nu.is_finite() {
        return Err(QuadError::NotFinite { x });
    }
    let a = nu.abs();
    let psi = |u: f64| {
        // cosh u − 1 = 2 sinh²(u/2) keeps small u accurate
        let s = (0.5 * u).sinh();
        a * u - 2.0 * x * s * s
    };
    let u_star = (a / x).asinh();
    let peak = psi(u_star);
    let curvature = x * u_star.cosh();
    let scale = 1.0 / curvature.sqrt();
    let (lo, hi) = peak_window(|u| -psi(u), u_star, scale, CUTOFF, 1e3);
    let lo = lo.max(0.0);
    let integrand = |u: f64| (psi(u) - peak).exp() * 0.5 * (1.0 + (-2.0 * a * u).exp());
    let est = integrate(integrand, lo, hi, quad)?;
    Ok(-x + peak + est.value.ln())
}

/// `K_ν(x)`; underflows to zero for very large `x`, use [`ln_bessel_k`] there.
pub fn bessel_k(nu: f64, x: f64, quad: &QuadratureSpec) -> Result<f64, QuadError> {
    ln_bessel_k(nu, x, quad).map(f64::exp)
}
