//! Witness sets for polynomial decay of the arithmetic mean.
//!
//! `B_n` holds the points whose first `n` digits are 2 and whose next digit is
//! `m`. Their mean over `n + 1` digits is `(2n + m)/(n + 1)`, and `m` is chosen
//! so that this lands in `J`. Since `g₂ⁿ(y) = y/(ny + 1)`, the set is an explicit
//! interval of length of order `n⁻⁴`.
//!
//! The mean `(2n + m)/(n + 1) = (z + 2)/(n + 1)` trails `z/n` by about
//! `(inf J − 2)/n`, so it can miss `J`: for `J = [a, b]` with integer `a` it
//! lands in `J` exactly when `a ≤ 3`. `membership_certified` reports the
//! outcome instead of assuming it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive};
use serde::Serialize;

use super::{Endpoint, TargetInterval};
use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::renyi::Digit;

#[derive(Clone, Debug, Serialize)]
pub struct BnWitness {
    pub n: u64,
    /// Smallest integer with `z/n ∈ (inf J, inf J + |J|/2)`.
    pub z: u128,
    /// The digit in position `n + 1`: `z − 2(n − 1)`.
    pub m: Digit,
    /// `B_n = [lo, hi)`.
    pub lo: ExactRational,
    pub hi: ExactRational,
    pub measure: ExactRational,
    /// `(2n + m)/(n + 1)`, the mean over the first `n + 1` digits.
    pub mean: ExactRational,
    /// Exact check that `mean ∈ J`.
    pub membership_certified: bool,
}

fn exact_end(e: &Endpoint) -> Result<BigRational> {
    match e {
        Endpoint::Rational(r) => Ok(r.as_big_rational().clone()),
        // Every double is a dyadic rational; use it as given.
        Endpoint::Real(x) => BigRational::from_f64(*x).ok_or_else(|| Error::invalid("non-finite endpoint")),
        Endpoint::Infinite => Err(Error::invalid("the witness construction needs a bounded interval J")),
    }
}

/// `g₂ⁿ(y) = y/(ny + 1)`.
fn g2_power(n: u64, y: &BigRational) -> BigRational {
    let n = BigRational::from_integer(BigInt::from(n));
    y / (n * y + BigRational::one())
}

pub fn bn_measure(n: u64, target: &TargetInterval) -> Result<BnWitness> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let (a, b) = (exact_end(&target.lo)?, exact_end(&target.hi)?);
    let nr = BigRational::from_integer(BigInt::from(n));
    let half = (&b - &a) / BigRational::from_integer(2.into());
    // Smallest integer strictly above n·inf J.
    let z: BigInt = (&nr * &a).floor().to_integer() + 1;
    let zr = BigRational::from_integer(z.clone());
    if zr >= &nr * (&a + &half) {
        return Err(Error::invalid(format!(
            "no integer z with z/{n} in (inf J, inf J + |J|/2); n must be at least 2/|J|"
        )));
    }
    let m_big = &z - BigInt::from(2) * BigInt::from(n - 1);
    if m_big <= BigInt::from(2) {
        return Err(Error::invalid(format!("digit m = {m_big} is at most 2: J is too close to 2 for n = {n}")));
    }
    let too_big = || Error::invalid("z does not fit in 128 bits");
    let m: Digit = m_big.to_u128().ok_or_else(too_big)?;
    let z = z.to_u128().ok_or_else(too_big)?;
    // Digit-m cylinder [1 − 1/(m−1), 1 − 1/m), pulled back by g₂ⁿ.
    let one = BigRational::one();
    let y0 = &one - BigRational::new(1.into(), BigInt::from(m - 1));
    let y1 = &one - BigRational::new(1.into(), BigInt::from(m));
    let (lo, hi) = (g2_power(n, &y0), g2_power(n, &y1));
    let measure = &hi - &lo;
    let mean = ExactRational::from(BigRational::new(BigInt::from(2 * n as u128 + m), BigInt::from(n + 1)));
    let membership_certified = target.contains(&mean) && target.lo.is_exact() && target.hi.is_exact();
    Ok(BnWitness { n, z, m, lo: lo.into(), hi: hi.into(), measure: measure.into(), mean, membership_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit_stats::{birkhoff_mean, ArithmeticFunction};
    use crate::renyi::digits;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn closed_form_at_three() {
        let w = bn_measure(3, &"[3,4]".parse().unwrap()).unwrap();
        assert_eq!((w.z, w.m), (10, 6));
        assert_eq!(w.measure, r("1/357"));
        assert_eq!((w.lo.clone(), w.hi.clone()), (r("4/17"), r("5/21")));
        assert!(w.membership_certified);
    }

    #[test]
    fn membership_fails_above_three() {
        let w = bn_measure(3, &"[4,5]".parse().unwrap()).unwrap();
        assert_eq!((w.z, w.m), (13, 9));
        assert_eq!(w.mean, r("15/4"));
        assert!(!w.membership_certified);
    }

    #[test]
    fn points_inside_have_the_digit_pattern() {
        let j: TargetInterval = "[3,4]".parse().unwrap();
        let id = ArithmeticFunction::identity();
        for n in [3u64, 7, 20, 55] {
            let w = bn_measure(n, &j).unwrap();
            let width = &w.hi - &w.lo;
            for i in 0..25 {
                let x = &w.lo + &(&width * &ExactRational::ratio(i, 25));
                let ds = digits(&x, n as usize + 1).unwrap();
                assert!(ds.digits()[..n as usize].iter().all(|&d| d == 2));
                assert_eq!(ds.digits()[n as usize], w.m);
                let mean = birkhoff_mean(&id, &x, n as usize + 1).unwrap();
                assert!(j.contains_f64(mean), "n = {n}: {mean}");
            }
        }
    }

    #[test]
    fn errors() {
        assert!(bn_measure(3, &"[3,inf)".parse().unwrap()).is_err());
        assert!(bn_measure(1, &"[3,3.1]".parse().unwrap()).is_err());
        // inf J ≥ 2 forces m ≥ 3; J = [1.9, 2.5] at n = 10 gives z = 20, m = 2.
        assert_eq!(bn_measure(40, &"[2,2.1]".parse().unwrap()).unwrap().m, 3);
        assert!(bn_measure(10, &"[1.9,2.5]".parse().unwrap()).is_err());
    }

    #[test]
    fn polynomial_size() {
        let j: TargetInterval = "[3,4]".parse().unwrap();
        for n in [50u64, 200, 400] {
            let l = bn_measure(n, &j).unwrap().measure.to_f64();
            let scaled = l * (n as f64).powi(4);
            assert!((0.5..2.0).contains(&scaled), "n = {n}: {scaled}");
        }
    }
}
