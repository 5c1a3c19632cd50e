//! Quadrature on finite intervals with successive refinement.
//!
//! Every scheme doubles its resolution until two consecutive estimates agree
//! to the requested relative error. Infinite ranges are handled by the
//! callers, which truncate to a window outside of which the integrand is
//! below `e^{−cutoff}` relative to its peak (see [`peak_window`]).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TanhSinh,
    GaussLegendreComposite,
    NewtonCotesComposite,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::TanhSinh => "tanh-sinh",
            Scheme::GaussLegendreComposite => "gauss-legendre-composite",
            Scheme::NewtonCotesComposite => "newton-cotes-composite",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown quadrature scheme `{0}` (expected tanh-sinh, gauss-legendre-composite or newton-cotes-composite)")]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tanh-sinh" | "ts" => Ok(Scheme::TanhSinh),
            "gauss-legendre-composite" | "gauss-legendre" | "gl" => Ok(Scheme::GaussLegendreComposite),
            "newton-cotes-composite" | "newton-cotes" | "nc" => Ok(Scheme::NewtonCotesComposite),
            _ => Err(UnknownScheme(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    /// maximum number of refinements
    pub levels: usize,
    pub target_rel_err: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { scheme: Scheme::TanhSinh, levels: 12, target_rel_err: 1e-8 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_rel_err = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not reach relative error {target} after {levels} refinements (last estimate {value}, change {change})")]
    NotConverged { value: f64, change: f64, target: f64, levels: usize },
    #[error("non-finite integrand value at {x}")]
    NotFinite { x: f64 },
    #[error("invalid quadrature tolerance {0}")]
    BadTolerance(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// difference between the last two refinements
    pub change: f64,
    pub evaluations: usize,
}

/// Integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadError> {
    if !(spec.target_rel_err > 0.0) {
        return Err(QuadError::BadTolerance(spec.target_rel_err));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, change: 0.0, evaluations: 0 });
    }
    let mut ev = Evaluator { f, count: 0 };
    match spec.scheme {
        Scheme::TanhSinh => tanh_sinh(&mut ev, a, b, spec),
        Scheme::GaussLegendreComposite => refine(&mut ev, a, b, spec, gauss_legendre_panels),
        Scheme::NewtonCotesComposite => refine(&mut ev, a, b, spec, boole_panels),
    }
}

/// [`integrate`], retrying with the composite Newton-Cotes rule when the
/// tanh-sinh rule fails to converge.
pub fn integrate_with_fallback(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadError> {
    match integrate(&f, a, b, spec) {
        Err(QuadError::NotConverged { .. }) if spec.scheme == Scheme::TanhSinh => {
            let fallback = QuadratureSpec { scheme: Scheme::NewtonCotesComposite, levels: spec.levels.max(14), ..*spec };
            integrate(&f, a, b, &fallback)
        }
        other => other,
    }
}

struct Evaluator<F> {
    f: F,
    count: usize,
}

impl<F: Fn(f64) -> f64> Evaluator<F> {
    fn at(&mut self, x: f64) -> Result<f64, QuadError> {
        self.count += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NotFinite { x })
        }
    }
}

fn converged(new: f64, old: f64, tol: f64) -> bool {
    (new - old).abs() <= tol * new.abs() || (new == 0.0 && old == 0.0)
}

/// Double-exponential rule; level `k` uses step `2^{−k}` and reuses the
/// previous nodes.
fn tanh_sinh<F: Fn(f64) -> f64>(
    ev: &mut Evaluator<F>,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadError> {
    let r = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    // at |t| = 4 the nodes are within 1e-37 of the endpoints
    let t_max = 4.0;
    let node = |ev: &mut Evaluator<F>, t: f64| -> Result<f64, QuadError> {
        let s = half_pi * t.sinh();
        let ch = s.cosh();
        let w = half_pi * t.cosh() / (ch * ch);
        // 1 − tanh s computed without cancellation
        let dist = r / (s.exp() * ch);
        let (xp, xm) = (b - dist, a + dist);
        let mut sum = 0.0;
        if xp > a && xp < b {
            sum += ev.at(xp)?;
        }
        if t != 0.0 && xm > a && xm < b {
            sum += ev.at(xm)?;
        }
        Ok(w * sum)
    };
    let mut h = 1.0;
    let mut sum = node(ev, 0.0)?;
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += node(ev, k as f64 * h)?;
        k += 1;
    }
    let mut estimate = r * h * sum;
    let mut change = f64::INFINITY;
    for level in 1..=spec.levels {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += node(ev, k as f64 * h)?;
            k += 2;
        }
        let next = r * h * sum;
        change = (next - estimate).abs();
        let done = level >= 3 && converged(next, estimate, spec.target_rel_err);
        estimate = next;
        if done {
            return Ok(Estimate { value: estimate, change, evaluations: ev.count });
        }
    }
    Err(QuadError::NotConverged { value: estimate, change, target: spec.target_rel_err, levels: spec.levels })
}

/// Composite rule refined by doubling the panel count.
fn refine<F: Fn(f64) -> f64>(
    ev: &mut Evaluator<F>,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    rule: fn(&mut Evaluator<F>, f64, f64, usize) -> Result<f64, QuadError>,
) -> Result<Estimate, QuadError> {
    let mut panels = 4;
    let mut estimate = rule(ev, a, b, panels)?;
    let mut change = f64::INFINITY;
    for _ in 0..spec.levels {
        panels *= 2;
        let next = rule(ev, a, b, panels)?;
        change = (next - estimate).abs();
        let done = converged(next, estimate, spec.target_rel_err);
        estimate = next;
        if done {
            return Ok(Estimate { value: estimate, change, evaluations: ev.count });
        }
    }
    Err(QuadError::NotConverged { value: estimate, change, target: spec.target_rel_err, levels: spec.levels })
}

const GL_POINTS: usize = 10;

/// Nodes and weights of the `GL_POINTS`-point Gauss-Legendre rule on
/// `[−1, 1]`, by Newton iteration on the Legendre polynomial.
fn gauss_legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_nodes(GL_POINTS))
}

pub fn gauss_legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gauss_legendre_panels<F: Fn(f64) -> f64>(
    ev: &mut Evaluator<F>,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<f64, QuadError> {
    let rule = gauss_legendre_rule();
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * width;
        let mut s = 0.0;
        for &(x, w) in rule {
            s += w * ev.at(c + 0.5 * width * x)?;
        }
        total += 0.5 * width * s;
    }
    Ok(total)
}

/// Composite Boole rule (closed five-point Newton-Cotes).
fn boole_panels<F: Fn(f64) -> f64>(ev: &mut Evaluator<F>, a: f64, b: f64, panels: usize) -> Result<f64, QuadError> {
    let h = (b - a) / (4 * panels) as f64;
    let mut total = 0.0;
    let mut left = ev.at(a)?;
    for p in 0..panels {
        let x0 = a + (4 * p) as f64 * h;
        let f1 = ev.at(x0 + h)?;
        let f2 = ev.at(x0 + 2.0 * h)?;
        let f3 = ev.at(x0 + 3.0 * h)?;
        let f4 = ev.at(x0 + 4.0 * h)?;
        total += 2.0 * h / 45.0 * (7.0 * left + 32.0 * f1 + 12.0 * f2 + 32.0 * f3 + 7.0 * f4);
        left = f4;
    }
    Ok(total)
}

/// Window `[lo, hi]` around `center` outside of which `phi(x) − phi(center)`
/// exceeds `cutoff`, for a log-integrand `−phi` with a single well near
/// `center`. Steps outward in units of `scale`, growing the step by half each time.
pub fn peak_window(phi: impl Fn(f64) -> f64, center: f64, scale: f64, cutoff: f64, limit: f64) -> (f64, f64) {
    let base = phi(center);
    let reach = |dir: f64| {
        let mut step = scale;
        let mut x = center;
        while (x - center).abs() < limit {
            x = center + dir * step;
            let v = phi(x);
            if v.is_nan() || v - base > cutoff {
                break;
            }
            step *= 1.5;
        }
        x
    };
    (reach(-1.0), reach(1.0))
}
