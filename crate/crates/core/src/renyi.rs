//! The Rényi map `T x = 1/(1−x) − ⌊1/(1−x)⌋`, its backward continued fraction
//! digits, inverse branches and cylinder intervals, all in exact arithmetic.
//!
//! Cylinders are half-open `[lo, hi)`: the digit-`b` cylinder is
//! `[1 − 1/(b−1), 1 − 1/b)` and the point `1` never belongs to the domain.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::rational::ExactRational;

/// A BCF digit (always `>= 2`).
pub type Digit = u128;

/// Non-empty finite word of BCF digits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DigitWord(Vec<Digit>);

impl DigitWord {
    pub fn new(digits: Vec<Digit>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&bad) = digits.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDigit(bad as i64));
        }
        Ok(DigitWord(digits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<Digit> {
        self.0
    }

    /// The word with `d` appended.
    pub fn extended(&self, d: Digit) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDigit(d as i64));
        }
        let mut v = self.0.clone();
        v.push(d);
        Ok(DigitWord(v))
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl std::str::FromStr for DigitWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .split(',')
            .map(|t| t.trim().parse::<Digit>().map_err(|_| Error::invalid(format!("bad digit {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        DigitWord::new(digits)
    }
}

impl Serialize for DigitWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exact image of `[0, 1)` under the inverse branches of a digit word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderInterval {
    pub word: DigitWord,
    pub lo: ExactRational,
    pub hi: ExactRational,
}

impl CylinderInterval {
    /// Lebesgue measure of the cylinder.
    pub fn length(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        &self.lo <= x && x < &self.hi
    }
}

fn check_domain(x: &ExactRational) -> Result<()> {
    if x.in_unit_interval() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(x.to_string()))
    }
}

/// One step of the map on a reduced fraction `p/q` in `[0, 1)`.
/// Returns the digit and leaves `(p, q)` holding `T(p/q)`, still reduced.
fn step_big(p: &mut BigInt, q: &mut BigInt) -> BigInt {
    if p.is_zero() {
        return BigInt::from(2);
    }
    let gap = &*q - &*p;
    let (quot, rem) = q.div_rem(&gap);
    *p = rem;
    *q = gap;
    quot + 1
}

fn to_digit(d: BigInt, position: usize) -> Result<Digit> {
    d.to_u128().ok_or(Error::DigitOverflow { position })
}

/// `T(x)` computed exactly.
pub fn renyi_apply(x: &ExactRational) -> Result<ExactRational> {
    check_domain(x)?;
    let (mut p, mut q) = (x.numer().clone(), x.denom().clone());
    step_big(&mut p, &mut q);
    ExactRational::new(p, q)
}

/// `T^n(x)` computed exactly.
pub fn renyi_iterate(x: &ExactRational, n: usize) -> Result<ExactRational> {
    check_domain(x)?;
    let (mut p, mut q) = (x.numer().clone(), x.denom().clone());
    for _ in 0..n {
        if p.is_zero() {
            break;
        }
        step_big(&mut p, &mut q);
    }
    ExactRational::new(p, q)
}

/// The `n`-th digit `b_n(x) = ⌊1/(1 − T^{n−1} x)⌋ + 1` (`n >= 1`).
pub fn digit_at(x: &ExactRational, n: usize) -> Result<Digit> {
    if n == 0 {
        return Err(Error::invalid("digit index starts at 1"));
    }
    let y = renyi_iterate(x, n - 1)?;
    let (mut p, mut q) = (y.numer().clone(), y.denom().clone());
    to_digit(step_big(&mut p, &mut q), n)
}

/// The first `n` digits of `x`. Rationals have an eventually-all-2 tail, so
/// this is defined for every rational in `[0, 1)`.
pub fn digits(x: &ExactRational, n: usize) -> Result<DigitWord> {
    check_domain(x)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let (mut p, mut q) = (x.numer().clone(), x.denom().clone());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if p.is_zero() {
            out.resize(n, 2);
            break;
        }
        out.push(to_digit(step_big(&mut p, &mut q), i + 1)?);
    }
    Ok(DigitWord(out))
}

/// Digits of `numer/denom` using 128-bit integers only.
///
/// Requires `numer < denom`; digits are bounded by `denom + 1`, so any
/// `denom <= 2^127` is safe. Used for the dyadic Monte Carlo grid.
pub fn small_fraction_digits(numer: u128, denom: u128, n: usize, out: &mut Vec<Digit>) {
    debug_assert!(numer < denom);
    out.clear();
    let (mut p, mut q) = (numer, denom);
    for _ in 0..n {
        if p == 0 {
            out.resize(n, 2);
            return;
        }
        let gap = q - p;
        out.push(q / gap + 1);
        p = q % gap;
        q = gap;
    }
}

/// Inverse of `T` on the digit-`k` branch: `g_k(y) = (y + k − 2)/(y + k − 1)`.
pub fn inverse_branch(k: Digit) -> Result<MoebiusMap> {
    if k < 2 {
        return Err(Error::InvalidDigit(k as i64));
    }
    let k = BigInt::from(k);
    Ok(MoebiusMap::new(1, &k - 2, 1, &k - 1))
}

/// `g_{b₁} ∘ … ∘ g_{bₙ}`.
pub fn word_map(word: &DigitWord) -> MoebiusMap {
    word.digits()
        .iter()
        .fold(MoebiusMap::identity(), |acc, &b| acc.compose(&inverse_branch(b).expect("DigitWord digits are >= 2")))
}

/// Exact cylinder `g_{b₁} ∘ … ∘ g_{bₙ}([0, 1))`.
///
/// Branch compositions have nonnegative entries and determinant 1, so the
/// image is `[b/d, (a+b)/(c+d))` and its length is `1/(d(c+d))`.
pub fn cylinder(word: &DigitWord) -> CylinderInterval {
    let m = word_map(word);
    let lo = ExactRational::new(m.b.clone(), m.d.clone()).expect("d >= 1");
    let hi = ExactRational::new(&m.a + &m.b, &m.c + &m.d).expect("c + d >= 1");
    CylinderInterval { word: word.clone(), lo, hi }
}

/// Thaler's sequence: `c₀ = 1/2`, `c_n = g₂(c_{n−1})`, so `T c_n = c_{n−1}`.
/// Evaluated as `g₂ⁿ(1/2)` with `g₂ⁿ` built by repeated squaring.
pub fn thaler_c(n: u64) -> ExactRational {
    let g2n = inverse_branch(2).expect("2 is a digit").pow(n);
    g2n.apply(&ExactRational::ratio(1, 2)).expect("g2 has no pole on [0,1)")
}

/// `T'(x) = 1/(1 − x)²`.
pub fn derivative(x: &ExactRational) -> Result<ExactRational> {
    check_domain(x)?;
    let one_minus = ExactRational::one() - x;
    Ok(one_minus.pow(-2))
}

/// Distortion budget `D_n = 2·Σ_{j=1}^{n−1} c_{n−j−1} + 2` with `c_i = 1/(i+2)`:
/// bounds the oscillation of `log (Tⁿ)'` over any depth-`n` cylinder.
pub fn distortion_budget(n: u64) -> ExactRational {
    let mut sum = ExactRational::zero();
    for j in 1..n {
        sum = sum + ExactRational::ratio(1, (n - j - 1 + 2) as i64);
    }
    ExactRational::from_integer(2) * sum + ExactRational::from_integer(2)
}

/// Floating value of [`distortion_budget`], summed in closed form.
pub fn distortion_budget_f64(n: u64) -> f64 {
    // Σ_{j=1}^{n-1} 1/(n-j+1) = H_n − 1
    let h: f64 = (2..=n).map(|i| 1.0 / i as f64).sum();
    2.0 * h + 2.0
}

/// Integer bottom-row state of a branch composition, used by enumerations that
/// only need lengths and derivative ranges. Entries are nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Mat2 {
    pub a: u128,
    pub b: u128,
    pub c: u128,
    pub d: u128,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    /// `self ∘ g_k`, or `None` on overflow.
    #[inline]
    pub fn then_branch(&self, k: u128) -> Option<Mat2> {
        // [a b; c d] · [1 k-2; 1 k-1]
        let a = self.a.checked_add(self.b)?;
        let b = self.a.checked_mul(k - 2)?.checked_add(self.b.checked_mul(k - 1)?)?;
        let c = self.c.checked_add(self.d)?;
        let d = self.c.checked_mul(k - 2)?.checked_add(self.d.checked_mul(k - 1)?)?;
        Some(Mat2 { a, b, c, d })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> ExactRational {
        ExactRational::ratio(p, q)
    }

    #[test]
    fn renyi_examples() {
        assert_eq!(renyi_apply(&r(0, 1)).unwrap(), r(0, 1));
        assert_eq!(renyi_apply(&r(1, 2)).unwrap(), r(0, 1));
        assert_eq!(renyi_apply(&r(1, 3)).unwrap(), r(1, 2));
        assert!(renyi_apply(&r(1, 1)).is_err());
        assert!(renyi_apply(&r(-1, 3)).is_err());
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digit_at(&r(0, 1), 7).unwrap(), 2);
        assert_eq!(digit_at(&r(1, 2), 1).unwrap(), 3);
        assert_eq!(digit_at(&r(1, 2), 2).unwrap(), 2);
        assert_eq!(digits(&r(1, 2), 4).unwrap().digits(), &[3, 2, 2, 2]);
        assert_eq!(digits(&r(1, 3), 3).unwrap().digits(), &[2, 3, 2]);
        assert_eq!(digits(&r(0, 1), 3).unwrap().digits(), &[2, 2, 2]);
        assert!(digit_at(&r(1, 2), 0).is_err());
    }

    #[test]
    fn digits_agree_with_digit_at() {
        let x = r(355, 1131);
        let w = digits(&x, 12).unwrap();
        for (i, &d) in w.digits().iter().enumerate() {
            assert_eq!(digit_at(&x, i + 1).unwrap(), d);
        }
    }

    #[test]
    fn small_fraction_path_matches_exact_path() {
        let mut buf = Vec::new();
        for (p, q) in [(1u128, 2u128), (1, 3), (355, 1131), ((1 << 64) - 1, 1 << 64), (12345, 1 << 64)] {
            small_fraction_digits(p, q, 9, &mut buf);
            let x = ExactRational::new(BigInt::from(p), BigInt::from(q)).unwrap();
            assert_eq!(buf.as_slice(), digits(&x, 9).unwrap().digits());
        }
    }

    #[test]
    fn inverse_branch_examples() {
        let g2 = inverse_branch(2).unwrap();
        assert_eq!(g2, MoebiusMap::new(1, 0, 1, 1));
        assert_eq!(inverse_branch(3).unwrap().apply(&r(0, 1)).unwrap(), r(1, 2));
        assert!(inverse_branch(1).is_err());
        for n in 0..40u64 {
            let y = r(3, 7);
            let expected = r(3, 3 * n as i64 + 7);
            assert_eq!(g2.pow(n).apply(&y).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn cylinder_examples() {
        let c = cylinder(&DigitWord::new(vec![2]).unwrap());
        assert_eq!((c.lo.clone(), c.hi.clone()), (r(0, 1), r(1, 2)));
        for b in 2..30u128 {
            let c = cylinder(&DigitWord::new(vec![b]).unwrap());
            let bi = b as i64;
            assert_eq!(c.lo, ExactRational::one() - r(1, bi - 1));
            assert_eq!(c.hi, ExactRational::one() - r(1, bi));
            assert_eq!(c.length(), r(1, bi * (bi - 1)));
        }
        let c = cylinder(&DigitWord::new(vec![2, 3]).unwrap());
        assert_eq!((c.lo.clone(), c.hi.clone()), (r(1, 3), r(2, 5)));
        assert_eq!(c.length(), r(1, 15));
    }

    #[test]
    fn thaler_examples() {
        assert_eq!(thaler_c(0), r(1, 2));
        assert_eq!(thaler_c(1), r(1, 3));
        assert_eq!(thaler_c(10), r(1, 12));
        for n in 1..50 {
            assert_eq!(renyi_apply(&thaler_c(n)).unwrap(), thaler_c(n - 1));
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(derivative(&r(0, 1)).unwrap(), r(1, 1));
        assert_eq!(derivative(&r(1, 2)).unwrap(), r(4, 1));
        assert_eq!(derivative(&r(2, 3)).unwrap(), r(9, 1));
    }

    #[test]
    fn distortion_budget_closed_form() {
        assert_eq!(distortion_budget(1), r(2, 1));
        // n = 3: 2(c_1 + c_0) + 2 = 2(1/3 + 1/2) + 2
        assert_eq!(distortion_budget(3), r(11, 3));
        for n in 1..40 {
            assert!((distortion_budget(n).to_f64() - distortion_budget_f64(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn word_validation() {
        assert!(DigitWord::new(vec![]).is_err());
        assert!(DigitWord::new(vec![2, 1]).is_err());
        assert_eq!("3, 2,2".parse::<DigitWord>().unwrap().digits(), &[3, 2, 2]);
    }

    #[test]
    fn mat2_tracks_word_map() {
        let word = DigitWord::new(vec![2, 5, 3, 2, 2, 9]).unwrap();
        let big = word_map(&word);
        let small = word.digits().iter().fold(Mat2::IDENTITY, |m, &b| m.then_branch(b).unwrap());
        assert_eq!(
            (BigInt::from(small.a), BigInt::from(small.b), BigInt::from(small.c), BigInt::from(small.d)),
            (big.a, big.b, big.c, big.d)
        );
    }
}
