//! Piecewise evaluators: truncated series in `log ρ` inside a window around
//! `ρ = 1`, closed forms outside it.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::critical_point_table;
use crate::exact::{f_exact, g_exact, jbs_exact, ExactError};
use crate::roots::RootSolverConfig;
use crate::scalar::Coeff;
use crate::series::{families, Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("series window [{lo}, {hi}] (log units) leaves the disk of convergence |log ρ| < {radius}")]
    OutsideDisk { lo: f64, hi: f64, radius: f64 },
    #[error("empty or invalid series window [{lo}, {hi}]")]
    BadWindow { lo: f64, hi: f64 },
    #[error("unknown target `{0}` (expected F, G or JBS)")]
    UnknownTarget(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    F,
    G,
    #[serde(rename = "JBS")]
    Jbs,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::F => "F",
            Target::G => "G",
            Target::Jbs => "JBS",
        })
    }
}

impl FromStr for Target {
    type Err = ApproxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" | "f" => Ok(Target::F),
            "G" | "g" => Ok(Target::G),
            "JBS" | "jbs" | "J" => Ok(Target::Jbs),
            _ => Err(ApproxError::UnknownTarget(s.to_string())),
        }
    }
}

/// Evaluator settings as accepted from the command line or a JSON block.
/// `rho_range` is given in `ρ` (or `x`) units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorConfig {
    pub target: Target,
    pub order: usize,
    pub rho_range: [f64; 2],
}

impl EvaluatorConfig {
    /// Six terms on `ρ ∈ [0.04, 32.88]`.
    pub fn standard(target: Target) -> Self {
        EvaluatorConfig { target, order: 6, rho_range: [DEFAULT_RHO_L, DEFAULT_RHO_R] }
    }
}

pub const DEFAULT_RHO_L: f64 = 0.04;
pub const DEFAULT_RHO_R: f64 = 32.88;

#[derive(Clone, Debug)]
pub struct PiecewiseEvaluator {
    target: Target,
    order: usize,
    /// series coefficients in `log ρ`, offset and surd folded in
    coeffs: Vec<f64>,
    log_lo: f64,
    log_hi: f64,
    solver: RootSolverConfig,
}

/// Builds the evaluator from freshly generated exact coefficients.
pub fn make_evaluator(target: Target, order: usize, rho_range: (f64, f64)) -> Result<PiecewiseEvaluator, ApproxError> {
    let series = match target {
        Target::F => families::coeffs_f::<BigRational>(order)?,
        Target::G => families::coeffs_g::<BigRational>(order)?,
        Target::Jbs => families::coeffs_jbs::<BigRational>(order.max(2), families::Variable::Log)?.truncate(order),
    };
    PiecewiseEvaluator::from_series(target, &series, rho_range)
}

impl PiecewiseEvaluator {
    /// Uses a precomputed exact series (expansion in `log ρ`).
    pub fn from_series(
        target: Target,
        series: &Series<BigRational>,
        rho_range: (f64, f64),
    ) -> Result<Self, ApproxError> {
        let (rl, rr) = rho_range;
        if !(rl > 0.0 && rr > rl && rl <= 1.0 && rr >= 1.0 && rr.is_finite()) {
            return Err(ApproxError::BadWindow { lo: rl, hi: rr });
        }
        let (log_lo, log_hi) = (rl.ln(), rr.ln());
        let radius = critical_point_table().rho_x;
        if log_lo.abs() >= radius || log_hi.abs() >= radius {
            return Err(ApproxError::OutsideDisk { lo: log_lo, hi: log_hi, radius });
        }
        Ok(PiecewiseEvaluator {
            target,
            order: series.order(),
            coeffs: fold_coeffs(series),
            log_lo,
            log_hi,
            solver: RootSolverConfig::default(),
        })
    }

    pub fn from_config(cfg: &EvaluatorConfig) -> Result<Self, ApproxError> {
        make_evaluator(cfg.target, cfg.order, (cfg.rho_range[0], cfg.rho_range[1]))
    }

    pub fn standard(target: Target) -> Result<Self, ApproxError> {
        Self::from_config(&EvaluatorConfig::standard(target))
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Series window in `log ρ`.
    pub fn window(&self) -> (f64, f64) {
        (self.log_lo, self.log_hi)
    }

    /// Float coefficients in `log ρ` (offset and surd included).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn in_window(&self, rho: f64) -> bool {
        let s = rho.ln();
        s >= self.log_lo && s <= self.log_hi
    }

    /// Value at `ρ` (or `x` for `J_BS`).
    pub fn eval(&self, rho: f64) -> Result<f64, ApproxError> {
        if !(rho > 0.0) {
            return Err(ExactError::Domain { what: "piecewise evaluator", value: rho }.into());
        }
        let s = rho.ln();
        if s >= self.log_lo && s <= self.log_hi {
            return Ok(self.eval_series_log(s));
        }
        self.eval_outer(rho)
    }

    /// Value at `ρ = e^s`, keeping `s` exact on the series path.
    pub fn eval_log(&self, s: f64) -> Result<f64, ApproxError> {
        if s >= self.log_lo && s <= self.log_hi {
            return Ok(self.eval_series_log(s));
        }
        self.eval_outer(s.exp())
    }

    fn eval_series_log(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    fn eval_outer(&self, rho: f64) -> Result<f64, ApproxError> {
        Ok(match self.target {
            Target::F => f_exact(rho, &self.solver)?,
            Target::G => g_exact(rho, &self.solver)?,
            Target::Jbs => jbs_exact(rho, &self.solver)?,
        })
    }
}

/// Float coefficients in `log ρ` with the surd and offset folded in.
pub fn fold_coeffs(series: &Series<BigRational>) -> Vec<f64> {
    let surd = Coeff::to_f64(series.prefactor_sq()).sqrt();
    let mut coeffs: Vec<f64> = series.to_f64_coeffs().into_iter().map(|c| c * surd).collect();
    coeffs[0] += series.offset().value();
    coeffs
}

/// Closed-form value of the target.
pub fn exact_value(target: Target, rho: f64) -> Result<f64, ExactError> {
    let cfg = RootSolverConfig::default();
    match target {
        Target::F => f_exact(rho, &cfg),
        Target::G => g_exact(rho, &cfg),
        Target::Jbs => jbs_exact(rho, &cfg),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub order: usize,
    pub max_abs_error: f64,
    pub worst_rho: f64,
}

/// Largest `|series_N − exact|` over the grid, for each `N`. Grid points
/// are evaluated on the series path regardless of the window.
pub fn truncation_error_profile(
    target: Target,
    orders: &[usize],
    rho_grid: &[f64],
) -> Result<Vec<TruncationRow>, ApproxError> {
    let max_order = orders.iter().copied().max().unwrap_or(1).max(2);
    let series = match target {
        Target::F => families::coeffs_f::<BigRational>(max_order)?,
        Target::G => families::coeffs_g::<BigRational>(max_order)?,
        Target::Jbs => families::coeffs_jbs::<BigRational>(max_order, families::Variable::Log)?,
    };
    let exact: Vec<f64> = rho_grid.iter().map(|&r| exact_value(target, r)).collect::<Result<_, _>>()?;
    orders
        .iter()
        .map(|&n| -> Result<TruncationRow, ApproxError> {
            let coeffs = fold_coeffs(&series.truncate(n));
            let mut row = TruncationRow { order: n, max_abs_error: 0.0, worst_rho: 1.0 };
            for (&rho, &e) in rho_grid.iter().zip(&exact) {
                let s = rho.ln();
                let err = (coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c) - e).abs();
                if err > row.max_abs_error {
                    row = TruncationRow { order: n, max_abs_error: err, worst_rho: rho };
                }
            }
            Ok(row)
        })
        .collect()
}
