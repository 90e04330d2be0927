//! Lebesgue measure of deviation sets `{x : (1/n) Σ_{j≤n} ψ(b_j(x)) ∈ J}`,
//! exactly by cylinder enumeration or by Monte Carlo on a dyadic grid, plus
//! the explicit polynomial-decay witnesses `B_n` and decay-rate fits.

mod bn;
mod exact;
mod fit;
mod mc;

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::digit_stats::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::renyi::Digit;

pub use bn::{bn_measure, BnWitness};
pub use exact::{exact_measure, exact_measure_with, ExactConfig};
pub use fit::{rate_fit, LineFit, RateFit};
pub use mc::{mc_measure, MC_BLOCK};

/// One end of the target interval `J`.
#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint {
    Rational(ExactRational),
    /// An irrational or otherwise inexact endpoint such as `log 3`.
    Real(f64),
    /// `−∞` at the left end, `+∞` at the right end.
    Infinite,
}

impl Endpoint {
    fn to_f64(&self, right: bool) -> f64 {
        match self {
            Endpoint::Rational(r) => r.to_f64(),
            Endpoint::Real(x) => *x,
            Endpoint::Infinite if right => f64::INFINITY,
            Endpoint::Infinite => f64::NEG_INFINITY,
        }
    }

    fn is_exact(&self) -> bool {
        !matches!(self, Endpoint::Real(_))
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    /// `p/q`, an integer, a finite decimal, `inf`/`-inf`, or `ln(x)`/`log(x)`
    /// for a positive rational `x`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "+inf" | "-inf" | "∞" | "+∞" | "-∞" | "infinity" | "-infinity" => {
                return Ok(Endpoint::Infinite)
            }
            _ => {}
        }
        for prefix in ["ln(", "log("] {
            if let Some(arg) = s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) {
                let x: ExactRational = arg.parse()?;
                if !(x > 0) {
                    return Err(Error::invalid(format!("logarithm of non-positive {x}")));
                }
                return Ok(Endpoint::Real(x.to_f64().ln()));
            }
        }
        Ok(Endpoint::Rational(s.parse()?))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Rational(r) => write!(f, "{r}"),
            Endpoint::Real(x) => write!(f, "{x}"),
            Endpoint::Infinite => write!(f, "inf"),
        }
    }
}

/// The target interval `J` with open/closed flags. Infinite ends are open.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetInterval {
    pub lo: Endpoint,
    pub lo_closed: bool,
    pub hi: Endpoint,
    pub hi_closed: bool,
}

impl TargetInterval {
    pub fn new(lo: Endpoint, lo_closed: bool, hi: Endpoint, hi_closed: bool) -> Result<Self> {
        let lo_closed = lo_closed && lo != Endpoint::Infinite;
        let hi_closed = hi_closed && hi != Endpoint::Infinite;
        let (a, b) = (lo.to_f64(false), hi.to_f64(true));
        if a.is_nan() || b.is_nan() {
            return Err(Error::invalid("interval endpoint is NaN"));
        }
        let empty = match (&lo, &hi) {
            (Endpoint::Rational(x), Endpoint::Rational(y)) => x > y || (x == y && !(lo_closed && hi_closed)),
            _ => a > b || (a == b && !(lo_closed && hi_closed)),
        };
        if empty {
            let (l, r) = (if lo_closed { '[' } else { '(' }, if hi_closed { ']' } else { ')' });
            return Err(Error::invalid(format!("target interval {l}{lo}, {hi}{r} is empty")));
        }
        Ok(TargetInterval { lo, lo_closed, hi, hi_closed })
    }

    /// Closed interval with rational ends.
    pub fn closed(lo: ExactRational, hi: ExactRational) -> Result<Self> {
        Self::new(Endpoint::Rational(lo), true, Endpoint::Rational(hi), true)
    }

    /// `[lo, ∞)`.
    pub fn at_least(lo: Endpoint) -> Result<Self> {
        Self::new(lo, true, Endpoint::Infinite, false)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64(false)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64(true)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let (a, b) = (self.lo_f64(), self.hi_f64());
        (if self.lo_closed { x >= a } else { x > a }) && (if self.hi_closed { x <= b } else { x < b })
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        let above = match &self.lo {
            Endpoint::Rational(a) => {
                if self.lo_closed {
                    x >= a
                } else {
                    x > a
                }
            }
            Endpoint::Real(a) => x.to_f64() >= *a,
            Endpoint::Infinite => true,
        };
        let below = match &self.hi {
            Endpoint::Rational(b) => {
                if self.hi_closed {
                    x <= b
                } else {
                    x < b
                }
            }
            Endpoint::Real(b) => x.to_f64() <= *b,
            Endpoint::Infinite => true,
        };
        above && below
    }
}

impl FromStr for TargetInterval {
    type Err = Error;

    /// `a,b` (closed) or bracketed forms such as `[5/2,3)`, `(ln(3),inf)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (lo_closed, rest) = match s.chars().next() {
            Some('[') => (true, &s[1..]),
            Some('(') => (false, &s[1..]),
            _ => (true, s),
        };
        let (hi_closed, body) = match rest.chars().last() {
            Some(']') => (true, &rest[..rest.len() - 1]),
            Some(')') => (false, &rest[..rest.len() - 1]),
            _ => (true, rest),
        };
        // Split on the comma outside parentheses.
        let mut level = 0i32;
        let mut split = None;
        for (i, c) in body.char_indices() {
            match c {
                '(' => level += 1,
                ')' => level -= 1,
                ',' if level == 0 => split = Some(i),
                _ => {}
            }
        }
        let i = split.ok_or_else(|| Error::invalid(format!("interval {s:?} needs two comma-separated ends")))?;
        Self::new(body[..i].parse()?, lo_closed, body[i + 1..].parse()?, hi_closed)
    }
}

impl fmt::Display for TargetInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        let lo = if self.lo == Endpoint::Infinite { "-inf".to_string() } else { self.lo.to_string() };
        write!(f, "{l}{lo},{}{r}", self.hi)
    }
}

impl Serialize for TargetInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A probability that is either exact or a floating approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass {
    Exact(ExactRational),
    Approx(f64),
}

impl Mass {
    pub fn to_f64(&self) -> f64 {
        match self {
            Mass::Exact(r) => r.to_f64(),
            Mass::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactRational> {
        match self {
            Mass::Exact(r) => Some(r),
            Mass::Approx(_) => None,
        }
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mass::Exact(r) => write!(f, "{r}"),
            Mass::Approx(x) => write!(f, "{x:.17e}"),
        }
    }
}

/// Exact values serialize as `"p/q"` strings, approximations as numbers.
impl Serialize for Mass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mass::Exact(r) => r.serialize(s),
            Mass::Approx(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum DeviationMethod {
    Exact { cap: Digit },
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DeviationQuery {
    pub psi: ArithmeticFunction,
    pub n: usize,
    pub target: TargetInterval,
    pub method: DeviationMethod,
}

impl DeviationQuery {
    pub fn exact(psi: ArithmeticFunction, n: usize, target: TargetInterval, cap: Digit) -> Self {
        DeviationQuery { psi, n, target, method: DeviationMethod::Exact { cap } }
    }

    pub fn monte_carlo(psi: ArithmeticFunction, n: usize, target: TargetInterval, samples: u64, seed: u64) -> Self {
        DeviationQuery { psi, n, target, method: DeviationMethod::MonteCarlo { samples, seed } }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DeviationCounts {
    /// Enumeration nodes visited (exact mode).
    pub nodes: u64,
    /// Maximal runs of equally classified cylinders (exact mode).
    pub runs: u64,
    pub samples: u64,
    pub hits: u64,
}

/// `lower ≤ λ{mean ∈ J} ≤ upper`.
///
/// Exact mode: `upper = lower + tail_unresolved` and
/// `lower + tail_unresolved + outside = 1`. Monte Carlo: `lower = upper` is
/// the sample fraction and `tail_unresolved` its binomial standard error.
#[derive(Clone, Debug, Serialize)]
pub struct DeviationEstimate {
    pub lower: Mass,
    pub upper: Mass,
    pub tail_unresolved: Mass,
    pub outside: Option<Mass>,
    pub counts: DeviationCounts,
}

/// Dispatches on the query's method with default budgets.
pub fn estimate(query: &DeviationQuery) -> Result<DeviationEstimate> {
    match query.method {
        DeviationMethod::Exact { .. } => exact_measure(query),
        DeviationMethod::MonteCarlo { .. } => mc_measure(query),
    }
}

/// Three-way verdict on a range of ψ-sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Class {
    In,
    Out,
    Unresolved,
}

/// Membership test for sums `S = Σ ψ(b_j)` against `nJ`.
///
/// A range `[a, b]` is inside when `a ≥ in_lo` and `b ≤ in_hi`, and outside
/// when `b < out_lo` or `a > out_hi`. For integer-valued ψ and exact ends the
/// thresholds are the exact integer bounds of `nJ` and `in = out`; otherwise
/// they straddle the real ends by a rounding margin and sums inside the
/// margin stay unresolved.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SumTest {
    in_lo: f64,
    in_hi: f64,
    out_lo: f64,
    out_hi: f64,
    exact: bool,
}

/// Relative margin for floating sums of ψ values.
const SUM_MARGIN: f64 = 1e-9;

impl SumTest {
    pub(crate) fn new(psi: &ArithmeticFunction, n: usize, j: &TargetInterval) -> SumTest {
        let nr = ExactRational::from_integer(n as u64);
        if psi.is_integer_valued() && j.lo.is_exact() && j.hi.is_exact() {
            let lo = match &j.lo {
                Endpoint::Rational(a) => {
                    let t = &nr * a;
                    let f = t.floor();
                    let c = if ExactRational::from_integer(f.clone()) == t && j.lo_closed { f } else { f + 1 };
                    big_to_f64(&c)
                }
                _ => f64::NEG_INFINITY,
            };
            let hi = match &j.hi {
                Endpoint::Rational(b) => {
                    let t = &nr * b;
                    let f = t.floor();
                    let c = if ExactRational::from_integer(f.clone()) == t && !j.hi_closed { f - 1 } else { f };
                    big_to_f64(&c)
                }
                _ => f64::INFINITY,
            };
            return SumTest { in_lo: lo, in_hi: hi, out_lo: lo, out_hi: hi, exact: true };
        }
        let (a, b) = (n as f64 * j.lo_f64(), n as f64 * j.hi_f64());
        let margin = |x: f64| if x.is_finite() { SUM_MARGIN * x.abs().max(1.0) } else { 0.0 };
        SumTest {
            in_lo: a + margin(a),
            in_hi: b - margin(b),
            out_lo: a - margin(a),
            out_hi: b + margin(b),
            exact: false,
        }
    }

    #[inline]
    pub(crate) fn classify(&self, a: f64, b: f64) -> Class {
        if a >= self.in_lo && b <= self.in_hi {
            Class::In
        } else if b < self.out_lo || a > self.out_hi {
            Class::Out
        } else {
            Class::Unresolved
        }
    }

    /// Point verdict for sampling: boundary sums fall back to a plain
    /// comparison, which only matters on a null set.
    #[inline]
    pub(crate) fn contains_sum(&self, s: f64) -> bool {
        match self.classify(s, s) {
            Class::In => true,
            Class::Out => false,
            Class::Unresolved => {
                debug_assert!(!self.exact);
                let lo = (self.in_lo + self.out_lo) / 2.0;
                let hi = (self.in_hi + self.out_hi) / 2.0;
                s >= lo && s <= hi
            }
        }
    }
}

// Thresholds beyond 2⁵³ round, but only for windows far beyond any sum
// the enumeration can reach.
fn big_to_f64(x: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub(crate) fn validate(query: &DeviationQuery) -> Result<()> {
    if query.n == 0 {
        return Err(Error::invalid("window length n must be at least 1"));
    }
    Ok(())
}
