//! Arithmetic functions on digits and their Birkhoff averages along orbits.
//!
//! Digits are always extracted exactly; `ψ` is evaluated in double precision.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rational::ExactRational;
use crate::renyi::{digits, Digit};

#[derive(Clone)]
enum Kind {
    Identity,
    Logarithm,
    Reciprocal,
    PrimeTimesN,
    Table { values: BTreeMap<Digit, f64>, default: f64 },
    Custom { f: Arc<dyn Fn(Digit) -> f64 + Send + Sync>, tail: Option<(f64, f64)> },
}

/// A non-constant function on the digits `{2, 3, …}`.
#[derive(Clone)]
pub struct ArithmeticFunction {
    name: String,
    kind: Kind,
}

impl fmt::Debug for ArithmeticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArithmeticFunction({})", self.name)
    }
}

impl ArithmeticFunction {
    /// `ψ(n) = n` (arithmetic mean).
    pub fn identity() -> Self {
        ArithmeticFunction { name: "identity".into(), kind: Kind::Identity }
    }

    /// `ψ(n) = log n` (geometric mean).
    pub fn logarithm() -> Self {
        ArithmeticFunction { name: "logarithm".into(), kind: Kind::Logarithm }
    }

    /// `ψ(n) = 1/n` (harmonic mean).
    pub fn reciprocal() -> Self {
        ArithmeticFunction { name: "reciprocal".into(), kind: Kind::Reciprocal }
    }

    /// `ψ(n) = n` for prime `n`, else 0.
    pub fn prime_times_n() -> Self {
        ArithmeticFunction { name: "prime".into(), kind: Kind::PrimeTimesN }
    }

    /// Finite table of values; digits missing from the table map to `default`.
    pub fn table(name: impl Into<String>, values: BTreeMap<Digit, f64>, default: f64) -> Result<Self> {
        if values.keys().any(|&d| d < 2) {
            return Err(Error::invalid("table keys must be digits >= 2"));
        }
        if values.values().all(|&v| v == default) {
            return Err(Error::invalid("arithmetic function must be non-constant"));
        }
        Ok(ArithmeticFunction { name: name.into(), kind: Kind::Table { values, default } })
    }

    /// Arbitrary closure. Its range beyond any cap is unknown unless set with
    /// [`ArithmeticFunction::with_tail_bounds`].
    pub fn custom(name: impl Into<String>, f: impl Fn(Digit) -> f64 + Send + Sync + 'static) -> Self {
        ArithmeticFunction { name: name.into(), kind: Kind::Custom { f: Arc::new(f), tail: None } }
    }

    /// Declares global bounds `lo <= ψ(n) <= hi` for a custom function.
    pub fn with_tail_bounds(mut self, lo: f64, hi: f64) -> Self {
        if let Kind::Custom { tail, .. } = &mut self.kind {
            *tail = Some((lo, hi));
        }
        self
    }

    /// Looks up a preset by name: `identity`, `logarithm`/`log`,
    /// `reciprocal`/`harmonic`, `prime`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "identity" | "arithmetic" | "n" => Ok(Self::identity()),
            "logarithm" | "log" | "geometric" => Ok(Self::logarithm()),
            "reciprocal" | "harmonic" | "inverse" => Ok(Self::reciprocal()),
            "prime" | "prime-times-n" => Ok(Self::prime_times_n()),
            other => Err(Error::invalid(format!("unknown arithmetic function {other:?}"))),
        }
    }

    /// Parses a preset name or an inline table `2:1.5,3:0,...[;default]`.
    pub fn parse(spec: &str) -> Result<Self> {
        if !spec.contains(':') {
            return Self::preset(spec.trim());
        }
        let (body, default) = match spec.split_once(';') {
            Some((b, d)) => (b, d.trim().parse::<f64>().map_err(|_| Error::invalid("bad table default"))?),
            None => (spec, 0.0),
        };
        let mut values = BTreeMap::new();
        for entry in body.split(',') {
            let (k, v) = entry.split_once(':').ok_or_else(|| Error::invalid(format!("bad table entry {entry:?}")))?;
            let k: Digit = k.trim().parse().map_err(|_| Error::invalid(format!("bad digit {k:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::invalid(format!("bad value {v:?}")))?;
            values.insert(k, v);
        }
        Self::table(format!("table[{}]", spec.trim()), values, default)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, d: Digit) -> f64 {
        match &self.kind {
            Kind::Identity => d as f64,
            Kind::Logarithm => (d as f64).ln(),
            Kind::Reciprocal => 1.0 / d as f64,
            Kind::PrimeTimesN => {
                if is_prime(d) {
                    d as f64
                } else {
                    0.0
                }
            }
            Kind::Table { values, default } => values.get(&d).copied().unwrap_or(*default),
            Kind::Custom { f, .. } => f(d),
        }
    }

    /// True when every value is an integer, so sums of values are exact in
    /// double precision below `2^53`.
    pub fn is_integer_valued(&self) -> bool {
        match &self.kind {
            Kind::Identity | Kind::PrimeTimesN => true,
            Kind::Table { values, default } => default.fract() == 0.0 && values.values().all(|v| v.fract() == 0.0),
            _ => false,
        }
    }

    /// `(min, max)` of ψ over `{2, …, cap}`.
    pub fn range_capped(&self, cap: Digit) -> (f64, f64) {
        (2..=cap.max(2))
            .map(|d| self.eval(d))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// `(inf, sup)` of ψ over digits strictly greater than `cap`; infinite
    /// where unbounded or unknown.
    pub fn tail_range(&self, cap: Digit) -> (f64, f64) {
        let next = cap.saturating_add(1).max(2);
        match &self.kind {
            Kind::Identity => (next as f64, f64::INFINITY),
            Kind::Logarithm => ((next as f64).ln(), f64::INFINITY),
            Kind::Reciprocal => (0.0, 1.0 / next as f64),
            Kind::PrimeTimesN => (0.0, f64::INFINITY),
            Kind::Table { values, default } => {
                values.range(next..).map(|(_, &v)| v).fold((*default, *default), |(lo, hi), v| (lo.min(v), hi.max(v)))
            }
            Kind::Custom { tail, .. } => tail.unwrap_or((f64::NEG_INFINITY, f64::INFINITY)),
        }
    }

    /// `(inf, sup)` of ψ over all digits.
    pub fn global_range(&self) -> (f64, f64) {
        let (a, b) = self.range_capped(2);
        let (c, d) = self.tail_range(2);
        (a.min(c), b.max(d))
    }
}

impl Serialize for ArithmeticFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

/// Deterministic primality test on 128-bit integers.
pub fn is_prime(n: Digit) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 37 * 37 {
        return true;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let modulus = BigUint::from(n);
    let one = BigUint::from(1u32);
    let minus_one = &modulus - &one;
    // These bases are deterministic below 3.3e24; larger inputs are probable primes.
    let bases: &[u128] = &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    'witness: for &a in bases {
        let mut x = BigUint::from(a).modpow(&BigUint::from(d), &modulus);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &modulus;
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Birkhoff sum and mean of ψ over the first `n` digits of `x`.
#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffRecord {
    pub x: ExactRational,
    pub n: usize,
    pub sum: f64,
    pub mean: f64,
}

pub fn birkhoff_record(psi: &ArithmeticFunction, x: &ExactRational, n: usize) -> Result<BirkhoffRecord> {
    let w = digits(x, n)?;
    let sum = birkhoff_sum_of(psi, w.digits());
    Ok(BirkhoffRecord { x: x.clone(), n, sum, mean: sum / n as f64 })
}

/// `(1/n) Σ_{j≤n} ψ(b_j(x))`.
pub fn birkhoff_mean(psi: &ArithmeticFunction, x: &ExactRational, n: usize) -> Result<f64> {
    Ok(birkhoff_record(psi, x, n)?.mean)
}

pub fn birkhoff_sum_of(psi: &ArithmeticFunction, ds: &[Digit]) -> f64 {
    ds.iter().map(|&d| psi.eval(d)).collect::<CompensatedSum>().value()
}

/// Harmonic, geometric and arithmetic means of a digit prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThreeMeans {
    pub harmonic: f64,
    pub geometric: f64,
    pub arithmetic: f64,
}

pub fn means_of_digits(ds: &[Digit]) -> ThreeMeans {
    let n = ds.len() as f64;
    let recip: CompensatedSum = ds.iter().map(|&d| 1.0 / d as f64).collect();
    let logs: CompensatedSum = ds.iter().map(|&d| (d as f64).ln()).collect();
    let plain: CompensatedSum = ds.iter().map(|&d| d as f64).collect();
    ThreeMeans { harmonic: n / recip.value(), geometric: (logs.value() / n).exp(), arithmetic: plain.value() / n }
}

pub fn three_means(x: &ExactRational, n: usize) -> Result<ThreeMeans> {
    Ok(means_of_digits(digits(x, n)?.digits()))
}

/// Exact frequency of digit `d` among the first `n` digits of `x`.
pub fn digit_frequency(x: &ExactRational, n: usize, d: Digit) -> Result<ExactRational> {
    let w = digits(x, n)?;
    let count = w.digits().iter().filter(|&&b| b == d).count();
    ExactRational::new(count as i64, n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> ExactRational {
        ExactRational::ratio(p, q)
    }

    #[test]
    fn birkhoff_examples() {
        let id = ArithmeticFunction::identity();
        for n in [1, 5, 40] {
            assert_eq!(birkhoff_mean(&id, &r(0, 1), n).unwrap(), 2.0);
            assert!((birkhoff_mean(&ArithmeticFunction::logarithm(), &r(0, 1), n).unwrap() - 2f64.ln()).abs() < 1e-15);
        }
        assert_eq!(birkhoff_mean(&id, &r(1, 2), 4).unwrap(), 9.0 / 4.0);
    }

    #[test]
    fn three_means_examples() {
        assert_eq!(three_means(&r(0, 1), 9).unwrap(), ThreeMeans { harmonic: 2.0, geometric: 2.0, arithmetic: 2.0 });
        let m = three_means(&r(1, 2), 2).unwrap();
        assert!((m.harmonic - 12.0 / 5.0).abs() < 1e-15);
        assert!((m.geometric - 6f64.sqrt()).abs() < 1e-15);
        assert!((m.arithmetic - 2.5).abs() < 1e-15);
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(digit_frequency(&r(0, 1), 10, 2).unwrap(), r(1, 1));
        assert_eq!(digit_frequency(&r(1, 2), 4, 3).unwrap(), r(1, 4));
        assert_eq!(digit_frequency(&r(1, 3), 3, 2).unwrap(), r(2, 3));
    }

    #[test]
    fn record_mean_lies_between_extremes() {
        let psi = ArithmeticFunction::prime_times_n();
        let x = r(123_457, 1_000_003);
        let rec = birkhoff_record(&psi, &x, 25).unwrap();
        let vals: Vec<f64> = digits(&x, 25).unwrap().digits().iter().map(|&d| psi.eval(d)).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= rec.mean && rec.mean <= hi);
    }

    #[test]
    fn primes() {
        let small: Vec<u128> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 998_244_353));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn presets_and_tables() {
        assert_eq!(ArithmeticFunction::parse("log").unwrap().name(), "logarithm");
        let t = ArithmeticFunction::parse("2:1,3:5;0.5").unwrap();
        assert_eq!((t.eval(2), t.eval(3), t.eval(9)), (1.0, 5.0, 0.5));
        assert_eq!(t.tail_range(3), (0.5, 0.5));
        assert!(ArithmeticFunction::parse("2:1,3:1;1").is_err());
        assert!(ArithmeticFunction::parse("bogus").is_err());
        assert_eq!(ArithmeticFunction::reciprocal().tail_range(9), (0.0, 0.1));
        assert_eq!(ArithmeticFunction::identity().global_range(), (2.0, f64::INFINITY));
    }
}
