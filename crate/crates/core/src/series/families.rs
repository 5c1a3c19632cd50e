//! Exact Taylor coefficient tables.
//!
//! Everything is built from the even entire functions
//! `S(z) = sinh√z/√z = Σ zⁿ/(2n+1)!` and `C(z) = cosh√z = Σ zⁿ/(2n)!`:
//!
//! * `h = S⁻¹` around `S(0) = 1`, expanded in `ω − 1` (reversion),
//!   and in `y = log ω` (composition with `e^y − 1`);
//! * `𝒥(z) = z/2 − √z·tanh(√z/2) = z/2 − (z/2)·S(z/4)/C(z/4)`, giving the
//!   rate function `J_BS(ω) = 𝒥(h(ω))`;
//! * `𝓕(z) = z/2 − √z·coth√z + π²/2 = z/2 − C(z)/S(z) + π²/2` and
//!   `𝒢(z)² = z/(√z·coth√z − 1) = S(z)/D(z)` with `D(z) = (C(z) − S(z))/z`,
//!   giving `F(ρ) = 𝓕(h(1/ρ))` and `G(ρ) = 𝒢(h(1/ρ))`.
//!
//! The F and G tables are expansions in `s = log ρ`, i.e. the inner series is
//! `h(e^{−s})`: `F(ρ) = Σ d_{F,n}(log ρ)ⁿ`, `G(ρ) = √3·Σ d_{G,n}(log ρ)ⁿ`.
//!
//! With floating-point coefficients `h` and `h(e^y)` stay within about
//! 1e−14 relative through order 30, but the `J_BS`, `F` and `G` tables in `log` variables
//! lose relative accuracy geometrically (about 1e−8 at order 8, no digits
//! left by order 15) through cancellation. Use exact coefficients and round
//! them, as the evaluators do, when high orders are needed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Offset, Series, SeriesError, MAX_ORDER};
use crate::scalar::Coeff;

/// Expansion variable for the rate function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// powers of `ω − 1`
    Omega,
    /// powers of `log ω`
    Log,
}

/// Coefficient families exposed by the `coeffs` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "h_log")]
    HLog,
    #[serde(rename = "jbs_omega")]
    JbsOmega,
    #[serde(rename = "jbs_log")]
    JbsLog,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::H, Family::HLog, Family::JbsOmega, Family::JbsLog, Family::F, Family::G];

    pub fn name(self) -> &'static str {
        match self {
            Family::H => "h",
            Family::HLog => "h_log",
            Family::JbsOmega => "jbs_omega",
            Family::JbsLog => "jbs_log",
            Family::F => "F",
            Family::G => "G",
        }
    }

    /// Smallest order at which the family is meaningful.
    pub fn min_order(self) -> usize {
        match self {
            Family::JbsOmega | Family::JbsLog => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown coefficient family `{0}` (expected one of h, h_log, jbs_omega, jbs_log, F, G)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownFamily(s.to_string()))
    }
}

fn check_order(order: usize, min: usize) -> Result<(), SeriesError> {
    if order < min || order > MAX_ORDER {
        return Err(SeriesError::InvalidOrder { order, max: MAX_ORDER });
    }
    Ok(())
}

/// `S(z) = Σ zⁿ/(2n+1)!`.
pub fn sinhc_series<T: Coeff>(order: usize) -> Series<T> {
    factorial_series(order, 1)
}

/// `C(z) = Σ zⁿ/(2n)!`.
pub fn cosh_series<T: Coeff>(order: usize) -> Series<T> {
    factorial_series(order, 0)
}

/// `Σ zⁿ/(2n+shift)!` by the ratio recurrence.
fn factorial_series<T: Coeff>(order: usize, shift: i64) -> Series<T> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = T::one();
    for k in 0..=shift {
        if k > 0 {
            term = term / T::from_int(k);
        }
    }
    coeffs.push(term.clone());
    for n in 1..=order as i64 {
        term = term / T::from_int((2 * n + shift - 1) * (2 * n + shift));
        coeffs.push(term.clone());
    }
    Series::new(coeffs)
}

/// Scales the variable: `s(z) → s(c·z)`.
fn rescale<T: Coeff>(s: &Series<T>, c: &T) -> Series<T> {
    let mut factor = T::one();
    let coeffs = s
        .coeffs()
        .iter()
        .map(|a| {
            let out = a.clone() * factor.clone();
            factor = factor.clone() * c.clone();
            out
        })
        .collect();
    Series::new(coeffs)
}

/// Multiplies by `z` keeping the order.
fn shift_up<T: Coeff>(s: &Series<T>) -> Series<T> {
    let n = s.order();
    Series::from_fn(n, |k| if k == 0 { T::zero() } else { s.coeffs()[k - 1].clone() })
}

/// `𝒥(z) = z/2 − (z/2)·S(z/4)/C(z/4)`.
pub fn rate_kernel_series<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    let quarter = T::ratio(1, 4);
    let tanh_part = rescale(&sinhc_series::<T>(order), &quarter)
        .div(&rescale(&cosh_series::<T>(order), &quarter))?;
    let half = T::ratio(1, 2);
    let z_half = Series::identity(order).scale(&half);
    z_half.sub(&shift_up(&tanh_part).scale(&half))
}

/// `𝓕(z) − π²/2 = z/2 − C(z)/S(z)`.
pub fn f_kernel_series<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    let coth_part = cosh_series::<T>(order).div(&sinhc_series::<T>(order))?;
    Series::identity(order).scale(&T::ratio(1, 2)).sub(&coth_part)
}

/// `𝒢(z)² = S(z)/D(z)`, `D(z) = Σ 2(n+1)/(2n+3)!·zⁿ`.
pub fn g_kernel_sq_series<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    let s = sinhc_series::<T>(order + 1);
    let c = cosh_series::<T>(order + 1);
    let d = Series::from_fn(order, |n| c.coeffs()[n + 1].clone() - s.coeffs()[n + 1].clone());
    s.truncate(order).div(&d)
}

/// Shifts the variable down: `(s(z) − s(0))/z`, dropping one order.
fn shift_down<T: Coeff>(s: &Series<T>) -> Series<T> {
    Series::from_fn(s.order() - 1, |k| s.coeffs()[k + 1].clone())
}

/// Taylor coefficients of `h` by the recurrence of its differential equation.
///
/// `S` solves `4zS'' + 6S' − S = 0`, so its inverse satisfies
/// `4h·h'' = 6h'² − ω·h'³`. In `y = log ω` the equation for `H(y) = h(e^y)`
/// becomes autonomous: `4H·H'' = 4H·H' + 6H'² − H'³`. In both cases the
/// coefficient of `x^m` is linear in the unknown `a_{m+1}` with factor
/// `(m+1)(24m+36)`, which gives an O(N²) recurrence.
fn inverse_by_ode<T: Coeff>(order: usize, variable: Variable) -> Series<T> {
    // a: coefficients of h, p: of h', sq: of h'², cube: of h'³
    let mut a = vec![T::zero(); order + 1];
    let mut p = vec![T::zero(); order];
    let mut sq: Vec<T> = Vec::with_capacity(order);
    let mut cube: Vec<T> = Vec::with_capacity(order);
    let six = T::from_int(6);
    a[1] = six.clone();
    p[0] = six.clone();
    sq.push(six.clone() * six.clone());
    cube.push(sq[0].clone() * six.clone());

    for m in 1..order {
        let mi = m as i64;
        // h·h'' without the a_{m+1} term (from a_1·h''_{m−1})
        let mut hh2 = T::zero();
        for i in 2..=m {
            let j = (m - i) as i64;
            hh2 = hh2 + a[i].clone() * a[m - i + 2].clone() * T::from_int((j + 1) * (j + 2));
        }
        // h'² and h'³ without the p_m terms
        let mut sq_part = T::zero();
        for i in 1..m {
            sq_part = sq_part + p[i].clone() * p[m - i].clone();
        }
        let mut cube_part = p[0].clone() * sq_part.clone();
        for i in 1..m {
            cube_part = cube_part + p[i].clone() * sq[m - i].clone();
        }
        let known = match variable {
            Variable::Omega => {
                T::from_int(4) * hh2 - six.clone() * sq_part.clone() + cube_part.clone() + cube[m - 1].clone()
            }
            Variable::Log => {
                let mut hh1 = T::zero();
                for i in 1..=m {
                    hh1 = hh1 + a[i].clone() * p[m - i].clone();
                }
                T::from_int(4) * (hh2 - hh1) - six.clone() * sq_part.clone() + cube_part.clone()
            }
        };
        let next = -known / T::from_int((mi + 1) * (24 * mi + 36));
        a[m + 1] = next.clone();
        p[m] = next * T::from_int(mi + 1);
        let two_p0 = p[0].clone() + p[0].clone();
        sq.push(sq_part + two_p0 * p[m].clone());
        cube.push(cube_part + T::from_int(3) * sq[0].clone() * p[m].clone());
    }
    Series::new(a)
}

/// `√(1 + h·ω²)`, i.e. `cosh√h` expressed through `ω = S(h)`.
fn cosh_of_inverse<T: Coeff>(h: &Series<T>, omega: &Series<T>) -> Result<Series<T>, SeriesError> {
    let n = h.order();
    Series::constant(T::one(), n).add(&h.mul(&omega.mul(omega)?)?)?.sqrt()
}

/// `𝒥(h) = h/2 − h·ω/(1 + √(1 + h·ω²))`.
fn rate_from_inverse<T: Coeff>(h: &Series<T>, omega: &Series<T>) -> Result<Series<T>, SeriesError> {
    let n = h.order();
    let denom = Series::constant(T::one(), n).add(&cosh_of_inverse(h, omega)?)?;
    h.scale(&T::ratio(1, 2)).sub(&h.mul(omega)?.div(&denom)?)
}

/// `F − π²/2 = h/2 − √(1 + h·ω²)/ω` and `𝒢² = h/(√(1 + h·ω²)/ω − 1)`, with
/// `h = H(−s)` and `ω = e^{−s}`, computed one order higher so the `0/0` in
/// `𝒢²` can be cancelled.
fn f_g_from_inverse<T: Coeff>(h_neg: &Series<T>) -> Result<(Series<T>, Series<T>), SeriesError> {
    let n = h_neg.order();
    let omega = exp_series::<T>(n, -1);
    let inv_omega = exp_series::<T>(n, 1);
    let coth_term = cosh_of_inverse(h_neg, &omega)?.mul(&inv_omega)?;
    let f = h_neg.scale(&T::ratio(1, 2)).sub(&coth_term)?;
    let denom = coth_term.sub(&Series::constant(T::one(), n))?;
    let g_sq = shift_down(h_neg).div(&shift_down(&denom))?;
    Ok((f.truncate(n - 1).with_offset(Offset::HalfPiSquared), g_sq.sqrt()?))
}

/// `e^{sign·x}` including the constant term.
fn exp_series<T: Coeff>(order: usize, sign: i64) -> Series<T> {
    let mut out = Series::exp_minus_one(order, sign).into_coeffs();
    out[0] = T::one();
    Series::new(out)
}

/// Flips the sign of the odd coefficients: `s(x) → s(−x)`.
fn reflect<T: Coeff>(s: &Series<T>) -> Series<T> {
    Series::from_fn(s.order(), |k| {
        let c = s.coeffs()[k].clone();
        if k % 2 == 1 {
            -c
        } else {
            c
        }
    })
}

/// `h(ω) = Σ c_n (ω − 1)ⁿ`, the inverse of `S` near `ω = 1`.
pub fn coeffs_h<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    check_order(order, 1)?;
    Ok(inverse_by_ode(order, Variable::Omega))
}

/// `h(e^y) = Σ d_n yⁿ`.
pub fn coeffs_h_log<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    check_order(order, 1)?;
    Ok(inverse_by_ode(order, Variable::Log))
}

/// `J_BS` expanded in `ω − 1` or in `log ω`.
pub fn coeffs_jbs<T: Coeff>(order: usize, variable: Variable) -> Result<Series<T>, SeriesError> {
    check_order(order, 2)?;
    coeffs_jbs_from(&inverse_by_ode::<T>(order, variable), variable)
}

/// `F(ρ) = π²/2 + Σ a_n (log ρ)ⁿ` with `a_0 = −1`, so `d_{F,0} = π²/2 − 1`.
pub fn coeffs_f<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    check_order(order, 1)?;
    let h_neg = reflect(&inverse_by_ode::<T>(order + 1, Variable::Log));
    Ok(f_g_from_inverse(&h_neg)?.0)
}

/// `G(ρ) = √3·Σ d_{G,n}(log ρ)ⁿ`.
pub fn coeffs_g<T: Coeff>(order: usize) -> Result<Series<T>, SeriesError> {
    check_order(order, 1)?;
    let h_neg = reflect(&inverse_by_ode::<T>(order + 1, Variable::Log));
    Ok(f_g_from_inverse(&h_neg)?.1)
}

/// The same families by the textbook route: Newton reversion of `S` followed
/// by composition of the kernels `𝒥`, `𝓕 − π²/2`, `𝒢²` with the inner
/// series. O(N³) coefficient operations; kept as an independent check of the
/// recurrence route.
pub fn coeffs_by_composition<T: Coeff>(family: Family, order: usize) -> Result<Series<T>, SeriesError> {
    check_order(order, family.min_order())?;
    let h = sinhc_series::<T>(order).revert()?;
    match family {
        Family::H => Ok(h),
        Family::HLog => h.compose(&Series::exp_minus_one(order, 1)),
        Family::JbsOmega => rate_kernel_series::<T>(order)?.compose(&h),
        Family::JbsLog => rate_kernel_series::<T>(order)?.compose(&h.compose(&Series::exp_minus_one(order, 1))?),
        Family::F | Family::G => {
            let inner = h.compose(&Series::exp_minus_one(order, -1))?;
            if family == Family::F {
                Ok(f_kernel_series::<T>(order)?.compose(&inner)?.with_offset(Offset::HalfPiSquared))
            } else {
                g_kernel_sq_series::<T>(order)?.compose(&inner)?.sqrt()
            }
        }
    }
}

/// All families at one order, sharing the reversion and the inner
/// compositions.
#[derive(Clone, Debug)]
pub struct CoefficientTables<T> {
    pub h: Series<T>,
    pub h_log: Series<T>,
    pub jbs_omega: Series<T>,
    pub jbs_log: Series<T>,
    pub f: Series<T>,
    pub g: Series<T>,
}

impl<T: Coeff + Send + Sync> CoefficientTables<T> {
    pub fn compute(order: usize) -> Result<Self, SeriesError> {
        check_order(order, 2)?;
        let (h, h_log_ext) = rayon::join(
            || inverse_by_ode::<T>(order, Variable::Omega),
            || inverse_by_ode::<T>(order + 1, Variable::Log),
        );
        let h_log = h_log_ext.truncate(order);
        let ((jbs_omega, jbs_log), fg) = rayon::join(
            || {
                rayon::join(
                    || coeffs_jbs_from(&h, Variable::Omega),
                    || coeffs_jbs_from(&h_log, Variable::Log),
                )
            },
            || f_g_from_inverse(&reflect(&h_log_ext)),
        );
        let (f, g) = fg?;
        Ok(CoefficientTables { h, h_log, jbs_omega: jbs_omega?, jbs_log: jbs_log?, f, g })
    }

    pub fn get(&self, family: Family) -> &Series<T> {
        match family {
            Family::H => &self.h,
            Family::HLog => &self.h_log,
            Family::JbsOmega => &self.jbs_omega,
            Family::JbsLog => &self.jbs_log,
            Family::F => &self.f,
            Family::G => &self.g,
        }
    }
}

fn coeffs_jbs_from<T: Coeff>(h: &Series<T>, variable: Variable) -> Result<Series<T>, SeriesError> {
    let order = h.order();
    let omega = match variable {
        Variable::Omega => Series::constant(T::one(), order).add(&Series::identity(order))?,
        Variable::Log => exp_series(order, 1),
    };
    rate_from_inverse(h, &omega)
}

/// Coefficients of one family at the given order.
pub fn coeffs_family<T: Coeff>(family: Family, order: usize) -> Result<Series<T>, SeriesError> {
    match family {
        Family::H => coeffs_h(order),
        Family::HLog => coeffs_h_log(order),
        Family::JbsOmega => coeffs_jbs(order, Variable::Omega),
        Family::JbsLog => coeffs_jbs(order, Variable::Log),
        Family::F => coeffs_f(order),
        Family::G => coeffs_g(order),
    }
}
