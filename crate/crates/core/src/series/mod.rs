//! Truncated formal power series.
//!
//! A [`Series`] stores the coefficients `a_0..=a_N` of
//! `offset + sqrt(prefactor_sq) · Σ a_n xⁿ + O(x^{N+1})`. The prefactor carries
//! a quadratic surd (for example √3) and the offset a transcendental constant
//! (π²/2), so both stay symbolic while the coefficients remain in the field.
//!
//! All operations are exact when the coefficient field is exact. Intermediate
//! rationals grow quickly: at order 100 the coefficients of the reverted
//! `sinh√z/√z` series carry numerators and denominators with a few hundred
//! digits, and products inside compositions reach a few thousand. Orders are
//! capped at [`MAX_ORDER`].

pub mod families;
pub mod text;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Coeff;

/// Largest truncation order accepted by the coefficient generators.
pub const MAX_ORDER: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("prefactors differ: cannot combine √a·S with √b·T for a ≠ b")]
    PrefactorMismatch,
    #[error("operation is not defined on a series carrying a symbolic offset")]
    SymbolicOffset,
    #[error("division by a series with zero constant term")]
    ZeroConstantTerm,
    #[error("constant term {0} has no square root of the form r·√q")]
    NonSquareConstant(String),
    #[error("inner series of a composition must have zero constant term")]
    InnerConstantTerm,
    #[error("series with vanishing linear coefficient is not invertible")]
    NotInvertible,
    #[error("order {order} outside the supported range 1..={max}")]
    InvalidOrder { order: usize, max: usize },
}

/// Transcendental constant added to a series' value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Offset {
    #[default]
    None,
    /// π²/2
    HalfPiSquared,
}

impl Offset {
    pub fn value(self) -> f64 {
        match self {
            Offset::None => 0.0,
            Offset::HalfPiSquared => 0.5 * std::f64::consts::PI * std::f64::consts::PI,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Offset::None => "none",
            Offset::HalfPiSquared => "half_pi_sq",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "none" => Some(Offset::None),
            "half_pi_sq" => Some(Offset::HalfPiSquared),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
    prefactor_sq: T,
    offset: Offset,
}

impl<T: Coeff> Series<T> {
    /// Plain series `Σ coeffs[n] xⁿ` truncated at `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a constant term");
        Series { coeffs, prefactor_sq: T::one(), offset: Offset::None }
    }

    pub fn with_prefactor(mut self, prefactor_sq: T) -> Self {
        self.prefactor_sq = prefactor_sq;
        self
    }

    pub fn with_offset(mut self, offset: Offset) -> Self {
        self.offset = offset;
        self
    }

    /// Series with `a_n = f(n)` for `n = 0..=order`.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> T) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| T::zero())
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `x`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    /// `e^x − 1` when `sign = 1`, `e^{−x} − 1` when `sign = −1`.
    pub fn exp_minus_one(order: usize, sign: i64) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        let mut term = T::one();
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            term = term * T::from_int(sign) / T::from_int(n as i64);
            *c = term.clone();
        }
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&T> {
        self.coeffs.get(n)
    }

    pub fn prefactor_sq(&self) -> &T {
        &self.prefactor_sq
    }

    pub fn offset(&self) -> Offset {
        self.offset
    }

    fn is_plain(&self) -> bool {
        self.prefactor_sq.is_one() && self.offset == Offset::None
    }

    fn require_no_offset(&self) -> Result<(), SeriesError> {
        if self.offset != Offset::None {
            return Err(SeriesError::SymbolicOffset);
        }
        Ok(())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<T> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, T::zero());
        Series { coeffs, prefactor_sq: self.prefactor_sq.clone(), offset: self.offset }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.require_no_offset()?;
        other.require_no_offset()?;
        if self.prefactor_sq != other.prefactor_sq {
            return Err(SeriesError::PrefactorMismatch);
        }
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|k| self.coeffs[k].clone() + other.coeffs[k].clone()).collect();
        Ok(Series { coeffs, prefactor_sq: self.prefactor_sq.clone(), offset: Offset::None })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            prefactor_sq: self.prefactor_sq.clone(),
            offset: self.offset,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            prefactor_sq: self.prefactor_sq.clone(),
            offset: self.offset,
        }
    }

    /// Truncated product. Equal surds square out: √q·√q = q.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.require_no_offset()?;
        other.require_no_offset()?;
        let n = self.order().min(other.order());
        let coeffs = mul_coeffs(&self.coeffs, &other.coeffs, n);
        let s = Series::new(coeffs);
        Ok(if self.prefactor_sq == other.prefactor_sq {
            s.scale(&self.prefactor_sq)
        } else {
            s.with_prefactor(self.prefactor_sq.clone() * other.prefactor_sq.clone())
        })
    }

    pub fn recip(&self) -> Result<Self, SeriesError> {
        self.require_no_offset()?;
        let coeffs = inv_coeffs(&self.coeffs, self.order())?;
        let s = Series::new(coeffs);
        Ok(if self.prefactor_sq.is_one() {
            s
        } else {
            // 1/√q = √q/q
            s.scale(&(T::one() / self.prefactor_sq.clone()))
                .with_prefactor(self.prefactor_sq.clone())
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul(&other.recip()?)
    }

    /// Square root. The constant term is split as `q·r²`; `q` moves into the
    /// prefactor so the remaining coefficients stay in the field.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        self.require_no_offset()?;
        if !self.prefactor_sq.is_one() {
            return Err(SeriesError::NonSquareConstant(format!(
                "series already carries surd √{:?}",
                self.prefactor_sq
            )));
        }
        let (root, surd) = self.coeffs[0]
            .split_square()
            .ok_or_else(|| SeriesError::NonSquareConstant(format!("{:?}", self.coeffs[0])))?;
        let inv_surd = T::one() / surd.clone();
        let reduced: Vec<T> = self.coeffs.iter().map(|c| c.clone() * inv_surd.clone()).collect();
        let n = self.order();
        let two_root = root.clone() + root.clone();
        let mut out = vec![T::zero(); n + 1];
        out[0] = root;
        for k in 1..=n {
            let mut acc = reduced[k].clone();
            for i in 1..k {
                if !out[i].is_zero() && !out[k - i].is_zero() {
                    acc = acc - out[i].clone() * out[k - i].clone();
                }
            }
            out[k] = acc / two_root.clone();
        }
        Ok(Series::new(out).with_prefactor(surd))
    }

    /// `self(inner(x))`; `inner` must be plain with zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.require_no_offset()?;
        if !inner.is_plain() {
            return Err(SeriesError::PrefactorMismatch);
        }
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::InnerConstantTerm);
        }
        let n = self.order().min(inner.order());
        let coeffs = compose_coeffs(&self.coeffs, &inner.coeffs, n);
        Ok(Series::new(coeffs).with_prefactor(self.prefactor_sq.clone()))
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let coeffs = if n == 0 {
            vec![T::zero()]
        } else {
            (1..=n).map(|k| self.coeffs[k].clone() * T::from_int(k as i64)).collect()
        };
        Series { coeffs, prefactor_sq: self.prefactor_sq.clone(), offset: Offset::None }
    }

    /// Compositional inverse of `self − a_0`: returns `r` with
    /// `self(r(y)) − a_0 = y` to the order of `self`.
    ///
    /// Newton iteration `r ← r − (f(r) − y)/f'(r)` on `f = self − a_0`; every
    /// step doubles the number of correct coefficients.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if !self.is_plain() {
            return Err(SeriesError::SymbolicOffset);
        }
        let n = self.order();
        if n == 0 || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let mut f = self.coeffs.clone();
        f[0] = T::zero();
        let df = Series::new(f.clone()).derivative().into_coeffs();

        let mut r = vec![T::zero(); n + 1];
        r[1] = T::one() / f[1].clone();
        let mut known = 1;
        while known < n {
            let target = (2 * known).min(n);
            let fr = compose_coeffs(&f, &r[..=target], target);
            let dfr = compose_coeffs(&df, &r[..=target], target);
            let mut residual = fr;
            residual[1] = residual[1].clone() - T::one();
            let correction = mul_coeffs(&residual, &inv_coeffs(&dfr, target)?, target);
            for k in (known + 1)..=target {
                r[k] = r[k].clone() - correction[k].clone();
            }
            known = target;
        }
        Ok(Series::new(r))
    }

    /// Value at `x` in double precision, including surd and offset.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64());
        self.offset.value() + self.prefactor_sq.to_f64().sqrt() * poly
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(Coeff::to_f64).collect()
    }
}

fn valuation<T: Coeff>(a: &[T]) -> usize {
    a.iter().position(|c| !c.is_zero()).unwrap_or(a.len())
}

/// Truncated Cauchy product to `n + 1` coefficients, skipping zero runs.
fn mul_coeffs<T: Coeff>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let (va, vb) = (valuation(a), valuation(b));
    let mut out = vec![T::zero(); n + 1];
    for (k, slot) in out.iter_mut().enumerate().skip(va + vb) {
        let lo = va.max(k.saturating_sub(b.len() - 1));
        let hi = (k - vb).min(a.len() - 1);
        let mut acc = T::zero();
        for i in lo..=hi {
            let (x, y) = (&a[i], &b[k - i]);
            if !x.is_zero() && !y.is_zero() {
                acc = acc + x.clone() * y.clone();
            }
        }
        *slot = acc;
    }
    out
}

fn inv_coeffs<T: Coeff>(a: &[T], n: usize) -> Result<Vec<T>, SeriesError> {
    if a[0].is_zero() {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let inv0 = T::one() / a[0].clone();
    let mut out = vec![T::zero(); n + 1];
    out[0] = inv0.clone();
    for k in 1..=n {
        let mut acc = T::zero();
        for i in 1..=k.min(a.len() - 1) {
            if !a[i].is_zero() && !out[k - i].is_zero() {
                acc = acc + a[i].clone() * out[k - i].clone();
            }
        }
        out[k] = -(acc * inv0.clone());
    }
    Ok(out)
}

/// `Σ outer_k · inner^k` truncated at `n`, building powers of `inner`
/// incrementally. Requires `inner[0] == 0`.
fn compose_coeffs<T: Coeff>(outer: &[T], inner: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n + 1];
    out[0] = outer[0].clone();
    let last = (1..outer.len().min(n + 1)).rev().find(|&k| !outer[k].is_zero());
    let Some(last) = last else { return out };
    let inner = &inner[..inner.len().min(n + 1)];
    let mut power: Vec<T> = inner.to_vec();
    power.resize(n + 1, T::zero());
    for k in 1..=last {
        if !outer[k].is_zero() {
            for (o, p) in out.iter_mut().zip(&power).skip(k) {
                if !p.is_zero() {
                    *o = o.clone() + outer[k].clone() * p.clone();
                }
            }
        }
        if k < last {
            power = mul_coeffs(&power, inner, n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn qs(v: &[(i64, i64)]) -> Series<Q> {
        Series::new(v.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn add_cancels_and_identity() {
        let a = qs(&[(1, 1), (1, 1)]);
        let b = qs(&[(1, 1), (-1, 1)]);
        assert_eq!(a.add(&b).unwrap(), qs(&[(2, 1), (0, 1)]));
        assert_eq!(a.add(&Series::zero(1)).unwrap(), a);
        let c = qs(&[(0, 1), (1, 2)]).add(&qs(&[(0, 1), (1, 3)])).unwrap();
        assert_eq!(c.coeffs()[1], q(5, 6));
    }

    #[test]
    fn add_truncates_to_min_order() {
        let a = qs(&[(1, 1), (2, 1), (3, 1)]);
        let b = qs(&[(1, 1), (1, 1)]);
        assert_eq!(a.add(&b).unwrap().order(), 1);
    }

    #[test]
    fn add_rejects_mismatched_prefactor() {
        let a = qs(&[(1, 1)]).with_prefactor(q(3, 1));
        let b = qs(&[(1, 1)]);
        assert_eq!(a.add(&b), Err(SeriesError::PrefactorMismatch));
    }

    #[test]
    fn sqrt_of_perfect_square() {
        let a = qs(&[(1, 1), (2, 1), (1, 1), (0, 1)]);
        assert_eq!(a.sqrt().unwrap(), qs(&[(1, 1), (1, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn sqrt_moves_surd_into_prefactor() {
        // 3(1 + x)² = 3 + 6x + 3x²
        let a = qs(&[(3, 1), (6, 1), (3, 1)]);
        let r = a.sqrt().unwrap();
        assert_eq!(r.prefactor_sq(), &q(3, 1));
        assert_eq!(r.coeffs(), qs(&[(1, 1), (1, 1), (0, 1)]).coeffs());
        // squaring restores the input
        assert_eq!(r.mul(&r).unwrap(), a);
    }

    #[test]
    fn sqrt_rejects_negative_constant() {
        let a = qs(&[(-1, 1), (1, 1)]);
        assert!(matches!(a.sqrt(), Err(SeriesError::NonSquareConstant(_))));
    }

    #[test]
    fn division_by_zero_constant_fails() {
        let a = qs(&[(1, 1), (1, 1)]);
        let b = qs(&[(0, 1), (1, 1)]);
        assert_eq!(a.div(&b), Err(SeriesError::ZeroConstantTerm));
    }

    #[test]
    fn compose_exp_with_identity() {
        let exp = Series::<Q>::exp_minus_one(3, 1).add(&Series::constant(q(1, 1), 3)).unwrap();
        let r = exp.compose(&Series::identity(3)).unwrap();
        assert_eq!(r, qs(&[(1, 1), (1, 1), (1, 2), (1, 6)]));
    }

    #[test]
    fn compose_requires_zero_constant_inner() {
        let a = qs(&[(1, 1), (1, 1)]);
        assert_eq!(a.compose(&a), Err(SeriesError::InnerConstantTerm));
    }

    #[test]
    fn recip_of_surd_series() {
        // 1/(√3·(1 + x)) = √3·(1/3)(1 − x + x²)
        let a = qs(&[(1, 1), (1, 1), (0, 1)]).with_prefactor(q(3, 1));
        let r = a.recip().unwrap();
        assert_eq!(r.prefactor_sq(), &q(3, 1));
        assert_eq!(r.coeffs(), qs(&[(1, 3), (-1, 3), (1, 3)]).coeffs());
        let one = a.mul(&r).unwrap();
        assert_eq!(one, qs(&[(1, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn revert_identity_and_quadratic() {
        let id = Series::<Q>::identity(5);
        assert_eq!(id.revert().unwrap(), id);
        // y = x + x² → x = y − y² + 2y³ − 5y⁴ + 14y⁵ (Catalan numbers)
        let f = qs(&[(0, 1), (1, 1), (1, 1), (0, 1), (0, 1), (0, 1)]);
        let r = f.revert().unwrap();
        assert_eq!(r, qs(&[(0, 1), (1, 1), (-1, 1), (2, 1), (-5, 1), (14, 1)]));
    }

    #[test]
    fn revert_ignores_constant_term() {
        let f = qs(&[(7, 1), (2, 1), (0, 1)]);
        assert_eq!(f.revert().unwrap(), qs(&[(0, 1), (1, 2), (0, 1)]));
    }

    #[test]
    fn revert_rejects_zero_linear_term() {
        let f = qs(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(f.revert(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn offset_blocks_arithmetic() {
        let a = qs(&[(1, 1)]).with_offset(Offset::HalfPiSquared);
        assert_eq!(a.mul(&a), Err(SeriesError::SymbolicOffset));
        assert!((a.eval_f64(0.3) - (1.0 + Offset::HalfPiSquared.value())).abs() < 1e-15);
    }

    #[test]
    fn float_series_ops() {
        let a = Series::new(vec![4.0f64, 4.0, 1.0]);
        let r = a.sqrt().unwrap();
        assert_eq!(r.coeffs(), &[2.0, 1.0, 0.0]);
        assert_eq!(r.prefactor_sq(), &1.0);
    }
}
