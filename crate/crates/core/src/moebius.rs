use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// Fractional-linear map `y ↦ (a·y + b)/(c·y + d)` with integer coefficients.
///
/// Composition is matrix multiplication: `f.compose(&g)` is `f ∘ g`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MoebiusMap {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl MoebiusMap {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        MoebiusMap { a: a.into(), b: b.into(), c: c.into(), d: d.into() }.normalized()
    }

    pub fn identity() -> Self {
        MoebiusMap::new(1, 0, 0, 1)
    }

    pub fn determinant(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
        .normalized()
    }

    /// `self` composed with itself `n` times (identity for `n = 0`).
    pub fn pow(&self, mut n: u64) -> MoebiusMap {
        let mut base = self.clone();
        let mut acc = MoebiusMap::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        acc
    }

    pub fn apply(&self, y: &ExactRational) -> Result<ExactRational> {
        let (p, q) = (y.numer(), y.denom());
        let num = &self.a * p + &self.b * q;
        let den = &self.c * p + &self.d * q;
        if den.is_zero() {
            return Err(Error::invalid(format!("pole of {self:?} at {y}")));
        }
        ExactRational::new(num, den)
    }

    /// Derivative `det / (c·y + d)²`.
    pub fn derivative_at(&self, y: &ExactRational) -> Result<ExactRational> {
        let den = &self.c * y.numer() + &self.d * y.denom();
        if den.is_zero() {
            return Err(Error::invalid(format!("pole of {self:?} at {y}")));
        }
        let q = y.denom();
        ExactRational::new(self.determinant() * q * q, &den * &den)
    }

    // Matrices are projective: flip the overall sign so the leading
    // nonzero entry of the bottom row is positive.
    fn normalized(self) -> Self {
        let flip = if !self.c.is_zero() { self.c.is_negative() } else { self.d.is_negative() };
        if flip {
            MoebiusMap { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_repeated_composition() {
        let m = MoebiusMap::new(1, 1, 1, 2);
        let mut slow = MoebiusMap::identity();
        for n in 0..12u64 {
            assert_eq!(m.pow(n), slow);
            slow = slow.compose(&m);
        }
    }

    #[test]
    fn derivative_of_unimodular_map() {
        let m = MoebiusMap::new(1, 0, 1, 1); // y/(y+1)
        let y = ExactRational::ratio(1, 2);
        assert_eq!(m.derivative_at(&y).unwrap(), ExactRational::ratio(4, 9));
    }

    #[test]
    fn pole_is_an_error() {
        let m = MoebiusMap::new(0, 1, 1, 0); // 1/y
        assert!(m.apply(&ExactRational::zero()).is_err());
    }
}
