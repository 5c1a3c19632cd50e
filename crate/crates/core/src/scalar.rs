//! Scalar abstractions.
//!
//! Two families of scalars are used across the crate:
//!
//! * [`Coeff`]: a field in which power-series coefficients live. Implemented
//!   for [`BigRational`] (exact work) and for `f32`/`f64` (jets and quick
//!   floating-point expansions).
//! * [`Real`]: a floating-point type for closed-form evaluation, root
//!   finding and quadrature.

use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Field of power-series coefficients.
pub trait Coeff: Num + Clone + Debug + std::ops::Neg<Output = Self> {
    fn from_int(n: i64) -> Self;

    /// Splits a positive constant `c` into `(r, q)` with `c = q·r²`, where `q`
    /// is the surd that cannot be absorbed in the field. Floating types always
    /// return `q = 1`.
    fn split_square(&self) -> Option<(Self, Self)>;

    fn to_f64(&self) -> f64;

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_int(n) / Self::from_int(d)
    }
}

impl Coeff for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn split_square(&self) -> Option<(Self, Self)> {
        if !self.is_positive() {
            return None;
        }
        // n/d = (n·d)/d², so only the squarefree part of n·d is irrational.
        let prod = self.numer() * self.denom();
        let (square_root, surd) = squarefree_split(&prod)?;
        let root = BigRational::new(square_root, self.denom().clone());
        Some((root, BigRational::from_integer(surd)))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Coeff for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn split_square(&self) -> Option<(Self, Self)> {
        (*self > 0.0).then(|| (self.sqrt(), 1.0))
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coeff for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }

    fn split_square(&self) -> Option<(Self, Self)> {
        (*self > 0.0).then(|| (self.sqrt(), 1.0))
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

/// Largest prime tried when extracting square factors.
const TRIAL_DIVISION_LIMIT: u64 = 10_000;

/// Writes a positive integer `m` as `r²·q`, `q` squarefree over the small
/// primes. Returns `None` when the leftover cofactor is neither a square nor
/// small enough to be certified squarefree.
fn squarefree_split(m: &BigInt) -> Option<(BigInt, BigInt)> {
    if m.sign() != Sign::Plus {
        return None;
    }
    let mut rest = m.clone();
    let mut root = BigInt::one();
    let mut surd = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            root *= bp.pow(e / 2);
            if e % 2 == 1 {
                surd *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((root, surd));
    }
    let s = rest.sqrt();
    if &s * &s == rest {
        return Some((root * s, surd));
    }
    // a leftover below the trial bound squared is prime
    let bound = BigInt::from(TRIAL_DIVISION_LIMIT);
    if rest < &bound * &bound {
        return Some((root, surd * rest));
    }
    None
}

/// Floating-point scalar for closed-form evaluation and quadrature.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn split_square_of_rationals() {
        assert_eq!(q(9, 4).split_square(), Some((q(3, 2), q(1, 1))));
        assert_eq!(q(3, 1).split_square(), Some((q(1, 1), q(3, 1))));
        // 12/25 = 3·(2/5)²
        assert_eq!(q(12, 25).split_square(), Some((q(2, 5), q(3, 1))));
        // 1/3 = 3·(1/3)²
        assert_eq!(q(1, 3).split_square(), Some((q(1, 3), q(3, 1))));
        assert_eq!(q(-4, 1).split_square(), None);
    }

    #[test]
    fn split_square_large_prime_square() {
        // 10007 is prime and above the trial-division limit
        let p = BigInt::from(10_007u64);
        let m = BigRational::from_integer(&p * &p * BigInt::from(12));
        let (r, s) = m.split_square().unwrap();
        assert_eq!(s, q(3, 1));
        assert_eq!(r, BigRational::from_integer(p * BigInt::from(2)));
    }

    #[test]
    fn float_split_is_trivial() {
        assert_eq!(4.0f64.split_square(), Some((2.0, 1.0)));
        assert_eq!(0.0f64.split_square(), None);
    }
}
