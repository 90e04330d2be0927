//! Exact deviation measure by pruned cylinder enumeration.
//!
//! Depth-first search over digit words visits cylinders left to right:
//! children `2, …, B` in order and then the tail set of all digits above `B`,
//! which is the rightmost piece `G_w([1 − 1/B, 1))`. Each node is classified
//! from the range of achievable sums; decided pieces are emitted as
//! consecutive segments of `[0, 1)`, so equal neighbours merge into runs and
//! a class's measure is a sum of run lengths.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{validate, Class, DeviationCounts, DeviationEstimate, DeviationMethod, DeviationQuery, Mass, SumTest};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rational::ExactRational;
use crate::renyi::{Digit, Mat2};

#[derive(Clone, Copy, Debug)]
pub struct ExactConfig {
    /// Maximum enumeration nodes before a budget error.
    pub node_limit: u64,
    /// Up to this many runs the class measures are summed exactly; beyond
    /// it they are floating sums of exactly computed run lengths.
    pub exact_run_limit: usize,
    /// Largest admissible digit cap (each node has `cap` children).
    pub max_cap: Digit,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { node_limit: 4_000_000_000, exact_run_limit: 4096, max_cap: 1 << 20 }
    }
}

pub fn exact_measure(query: &DeviationQuery) -> Result<DeviationEstimate> {
    exact_measure_with(query, &ExactConfig::default())
}

pub fn exact_measure_with(query: &DeviationQuery, config: &ExactConfig) -> Result<DeviationEstimate> {
    validate(query)?;
    let DeviationMethod::Exact { cap } = query.method else {
        return Err(Error::invalid("exact_measure needs an exact-enumeration query"));
    };
    if cap < 2 || cap > config.max_cap {
        return Err(Error::invalid(format!("digit cap must lie in [2, {}], got {cap}", config.max_cap)));
    }
    let psi = &query.psi;
    let values: Vec<f64> = (2..=cap).map(|d| psi.eval(d)).collect();
    let (cmin, cmax) = psi.range_capped(cap);
    let tail = psi.tail_range(cap);
    let ctx = Ctx {
        values,
        tail,
        global: (cmin.min(tail.0), cmax.max(tail.1)),
        test: SumTest::new(psi, query.n, &query.target),
        cap,
        n: query.n,
        node_limit: config.node_limit,
        nodes: AtomicU64::new(0),
    };
    let mut sink = Sink::new((0, 1), config.exact_run_limit);
    ctx.node(Mat2::IDENTITY, 0.0, 0, &mut sink)?;
    let nodes = ctx.nodes.load(Ordering::Relaxed);
    let runs = sink.run_count;
    let [inside, unresolved, outside] = sink.measures();
    let upper = match (&inside, &unresolved) {
        (Mass::Exact(a), Mass::Exact(b)) => Mass::Exact(a + b),
        _ => Mass::Approx((inside.to_f64() + unresolved.to_f64()).min(1.0)),
    };
    Ok(DeviationEstimate {
        lower: inside,
        upper,
        tail_unresolved: unresolved,
        outside: Some(outside),
        counts: DeviationCounts { nodes, runs, samples: 0, hits: 0 },
    })
}

/// Right end `p/q` of a run; its left end is the previous run's.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Run {
    class: Class,
    p: u128,
    q: u128,
}

fn class_index(c: Class) -> usize {
    match c {
        Class::In => 0,
        Class::Unresolved => 1,
        Class::Out => 2,
    }
}

/// Consecutive segments of `[start, …)`. Floating class measures are summed
/// segment by segment; the exact run list is kept while it stays short.
struct Sink {
    start: (u128, u128),
    runs: Option<Vec<Run>>,
    run_count: u64,
    first: Option<Class>,
    last: Option<Class>,
    sums: [CompensatedSum; 3],
    limit: usize,
}

impl Sink {
    fn new(start: (u128, u128), limit: usize) -> Sink {
        Sink { start, runs: Some(Vec::new()), run_count: 0, first: None, last: None, sums: Default::default(), limit }
    }

    #[inline]
    fn push(&mut self, class: Class, end: (u128, u128), length: f64) {
        self.sums[class_index(class)].add(length);
        if self.last != Some(class) {
            self.run_count += 1;
            self.first.get_or_insert(class);
            self.last = Some(class);
            if let Some(runs) = &mut self.runs {
                if runs.len() >= self.limit {
                    self.runs = None;
                    return;
                }
                runs.push(Run { class, p: end.0, q: end.1 });
                return;
            }
        }
        if let Some(last) = self.runs.as_mut().and_then(|r| r.last_mut()) {
            (last.p, last.q) = end;
        }
    }

    /// Appends a sink covering the interval that starts where `self` ends.
    fn append(&mut self, other: Sink) {
        let Some(first) = other.first else { return };
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
        let joined = self.last == Some(first);
        self.run_count += other.run_count - joined as u64;
        self.first.get_or_insert(first);
        self.last = other.last;
        match (&mut self.runs, other.runs) {
            (Some(mine), Some(theirs)) if mine.len() + theirs.len() <= self.limit + joined as usize => {
                let mut it = theirs.into_iter();
                if joined {
                    let head = it.next().expect("non-empty");
                    let last = mine.last_mut().expect("joined implies non-empty");
                    (last.p, last.q) = (head.p, head.q);
                }
                mine.extend(it);
            }
            _ => self.runs = None,
        }
    }

    /// Measures of the In, Unresolved and Out classes.
    fn measures(&self) -> [Mass; 3] {
        let Some(runs) = &self.runs else {
            return std::array::from_fn(|i| Mass::Approx(self.sums[i].value()));
        };
        let mut parts: [Vec<BigRational>; 3] = Default::default();
        let mut prev = self.start;
        for r in runs {
            let num = BigInt::from(r.p) * BigInt::from(prev.1) - BigInt::from(prev.0) * BigInt::from(r.q);
            let den = BigInt::from(r.q) * BigInt::from(prev.1);
            parts[class_index(r.class)].push(BigRational::new(num, den));
            prev = (r.p, r.q);
        }
        parts.map(|v| Mass::Exact(ExactRational::from(tree_sum(&v))))
    }
}

struct Ctx {
    values: Vec<f64>,
    tail: (f64, f64),
    global: (f64, f64),
    test: SumTest,
    cap: Digit,
    n: usize,
    node_limit: u64,
    nodes: AtomicU64,
}

/// Levels of the search tree whose children run in parallel.
const PAR_LEVELS: usize = 2;
/// Nodes counted locally before touching the shared counter.
const COUNT_BATCH: u64 = 1 << 14;

fn overflow() -> Error {
    Error::Budget {
        what: "exact deviation enumeration",
        needed: f64::INFINITY,
        limit: u128::MAX as f64,
        suggestion: "a smaller window n or digit cap (cylinder endpoints exceed 128 bits)".into(),
    }
}

/// Right end `(a+b)/(c+d)` of the cylinder of `m`.
#[inline]
fn right_end(m: &Mat2) -> Result<(u128, u128)> {
    Ok((m.a.checked_add(m.b).ok_or_else(overflow)?, m.c.checked_add(m.d).ok_or_else(overflow)?))
}

/// `|G([0, 1))| = 1/(d(c + d))`.
#[inline]
fn cylinder_length(m: &Mat2) -> f64 {
    1.0 / (m.d as f64 * (m.c as f64 + m.d as f64))
}

impl Ctx {
    /// `r·[lo, hi]` with `0·∞ = 0`.
    fn span(&self, r: usize) -> (f64, f64) {
        if r == 0 {
            (0.0, 0.0)
        } else {
            (r as f64 * self.global.0, r as f64 * self.global.1)
        }
    }

    fn charge(&self, local: &mut u64, k: u64) -> Result<()> {
        *local += k;
        if *local >= COUNT_BATCH {
            self.flush(local)?;
        }
        Ok(())
    }

    fn flush(&self, local: &mut u64) -> Result<()> {
        let total = self.nodes.fetch_add(*local, Ordering::Relaxed) + *local;
        *local = 0;
        if total > self.node_limit {
            return Err(Error::Budget {
                what: "exact deviation enumeration",
                needed: total as f64,
                limit: self.node_limit as f64,
                suggestion: "a smaller window n, a smaller digit cap, or Monte Carlo".into(),
            });
        }
        Ok(())
    }

    /// Processes the cylinder of `m` (prefix length `len`, prefix sum `s`).
    fn node(&self, m: Mat2, s: f64, len: usize, out: &mut Sink) -> Result<()> {
        let mut local = 0;
        let res = self.visit(m, s, len, out, &mut local);
        self.flush(&mut local)?;
        res
    }

    fn visit(&self, m: Mat2, s: f64, len: usize, out: &mut Sink, local: &mut u64) -> Result<()> {
        self.charge(local, 1)?;
        let r = self.n - len;
        let (lo, hi) = self.span(r);
        let class = self.test.classify(s + lo, s + hi);
        if class != Class::Unresolved || r == 0 {
            out.push(class, right_end(&m)?, cylinder_length(&m));
            return Ok(());
        }
        if len < PAR_LEVELS && r > 1 {
            let parts: Vec<Sink> = (2..=self.cap)
                .into_par_iter()
                .map(|k| {
                    let child = m.then_branch(k).ok_or_else(overflow)?;
                    let mut sink = Sink::new((child.b, child.d), out.limit);
                    self.node(child, s + self.values[(k - 2) as usize], len + 1, &mut sink)?;
                    Ok(sink)
                })
                .collect::<Result<_>>()?;
            for p in parts {
                out.append(p);
            }
        } else if r == 1 {
            // Leaves in a flat loop.
            self.charge(local, self.cap as u64 - 1)?;
            for k in 2..=self.cap {
                let child = m.then_branch(k).ok_or_else(overflow)?;
                let v = s + self.values[(k - 2) as usize];
                out.push(self.test.classify(v, v), right_end(&child)?, cylinder_length(&child));
            }
        } else {
            for k in 2..=self.cap {
                let child = m.then_branch(k).ok_or_else(overflow)?;
                self.visit(child, s + self.values[(k - 2) as usize], len + 1, out, local)?;
            }
        }
        // Tail piece G([1 − 1/B, 1)): one digit above the cap, then r − 1
        // free digits. Its length is 1/((c + d)(c(B − 1) + dB)).
        let (lo, hi) = self.span(r - 1);
        let class = self.test.classify(s + self.tail.0 + lo, s + self.tail.1 + hi);
        let b = self.cap as f64;
        let length = 1.0 / ((m.c as f64 + m.d as f64) * (m.c as f64 * (b - 1.0) + m.d as f64 * b));
        out.push(class, right_end(&m)?, length);
        Ok(())
    }
}

fn tree_sum(v: &[BigRational]) -> BigRational {
    match v.len() {
        0 => BigRational::zero(),
        1 => v[0].clone(),
        n => tree_sum(&v[..n / 2]) + tree_sum(&v[n / 2..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviation::TargetInterval;
    use crate::digit_stats::{birkhoff_sum_of, ArithmeticFunction};
    use crate::renyi::{cylinder, DigitWord};

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn query(psi: ArithmeticFunction, n: usize, j: &str, cap: Digit) -> DeviationQuery {
        DeviationQuery::exact(psi, n, j.parse().unwrap(), cap)
    }

    /// Brute force over all capped words; only the capped part is resolved.
    fn brute_capped(
        psi: &ArithmeticFunction,
        n: usize,
        j: &TargetInterval,
        cap: Digit,
    ) -> (ExactRational, ExactRational) {
        let mut inside = ExactRational::zero();
        let mut total = ExactRational::zero();
        let mut word = vec![2 as Digit; n];
        loop {
            let len = cylinder(&DigitWord::new(word.clone()).unwrap()).length();
            let sum = birkhoff_sum_of(psi, &word);
            if j.contains_f64(sum / n as f64) {
                inside = inside + &len;
            }
            total = total + len;
            let mut i = n;
            loop {
                if i == 0 {
                    return (inside, total);
                }
                i -= 1;
                if word[i] < cap {
                    word[i] += 1;
                    break;
                }
                word[i] = 2;
            }
        }
    }

    #[test]
    fn single_digit_examples() {
        let e = exact_measure(&query(ArithmeticFunction::identity(), 1, "[3,4]", 4)).unwrap();
        assert_eq!(e.lower, Mass::Exact(r("1/4")));
        assert_eq!(e.tail_unresolved, Mass::Exact(r("0")));
        let e = exact_measure(&query(ArithmeticFunction::identity(), 1, "[2,2]", 7)).unwrap();
        assert_eq!(e.lower, Mass::Exact(r("1/2")));
    }

    #[test]
    fn five_cylinders_at_depth_two() {
        let id = ArithmeticFunction::identity();
        let words = [[2, 3], [2, 4], [3, 2], [3, 3], [4, 2]];
        let expected: ExactRational =
            words.iter().map(|w| cylinder(&DigitWord::new(w.to_vec()).unwrap()).length()).sum();
        for cap in [4u128, 5, 9] {
            let e = exact_measure(&query(id.clone(), 2, "[5/2,3]", cap)).unwrap();
            assert_eq!(e.lower, Mass::Exact(expected.clone()), "cap {cap}");
            let (brute, _) = brute_capped(&id, 2, &"[5/2,3]".parse().unwrap(), cap);
            assert_eq!(e.lower.as_exact(), Some(&brute));
            // Any digit above 4 pushes the sum past 6.
            assert_eq!(e.tail_unresolved, Mass::Exact(r("0")));
        }
    }

    #[test]
    fn accounting_identity_and_brute_force() {
        let cases = [
            (ArithmeticFunction::identity(), 3, "(3,4]", 5u128),
            (ArithmeticFunction::logarithm(), 3, "[ln(3),inf)", 6),
            (ArithmeticFunction::reciprocal(), 3, "[0.3,0.45)", 5),
            (ArithmeticFunction::prime_times_n(), 2, "[1,3]", 7),
        ];
        for (psi, n, j, cap) in cases {
            let target: TargetInterval = j.parse().unwrap();
            let e = exact_measure(&query(psi.clone(), n, j, cap)).unwrap();
            let (lo, un, out) = (
                e.lower.as_exact().unwrap(),
                e.tail_unresolved.as_exact().unwrap(),
                e.outside.as_ref().unwrap().as_exact().unwrap(),
            );
            assert_eq!(lo + un + out.clone(), ExactRational::one(), "{j}");
            let (brute_in, brute_total) = brute_capped(&psi, n, &target, cap);
            // Every capped word in J is counted, unless it sits on a real boundary.
            assert!(lo.clone() + un.clone() >= brute_in, "{j}");
            assert!(lo <= &(brute_in.clone() + (ExactRational::one() - brute_total.clone())), "{j}");
            assert!(un <= &(ExactRational::one() - brute_total + brute_in), "{j}");
        }
    }

    #[test]
    fn trivial_targets() {
        let e = exact_measure(&query(ArithmeticFunction::identity(), 5, "[2,inf)", 10)).unwrap();
        assert_eq!(e.lower, Mass::Exact(ExactRational::one()));
        assert_eq!(e.counts.nodes, 1);
        let e = exact_measure(&query(ArithmeticFunction::identity(), 5, "[0,1.5]", 10)).unwrap();
        assert_eq!(e.lower, Mass::Exact(ExactRational::zero()));
        assert_eq!(e.tail_unresolved, Mass::Exact(ExactRational::zero()));
    }

    #[test]
    fn floating_fallback_matches_exact() {
        let q = query(ArithmeticFunction::identity(), 4, "[3,4]", 12);
        let exact = exact_measure(&q).unwrap();
        let approx = exact_measure_with(&q, &ExactConfig { exact_run_limit: 0, ..Default::default() }).unwrap();
        assert!(matches!(approx.lower, Mass::Approx(_)));
        assert_eq!(approx.counts, exact.counts);
        assert!((exact.lower.to_f64() - approx.lower.to_f64()).abs() < 1e-15);
        assert!((exact.tail_unresolved.to_f64() - approx.tail_unresolved.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn budget_and_validation() {
        let q = query(ArithmeticFunction::logarithm(), 12, "[ln(3),inf)", 60);
        let err = exact_measure_with(&q, &ExactConfig { node_limit: 1000, ..Default::default() }).unwrap_err();
        assert!(err.is_budget());
        assert!(exact_measure(&query(ArithmeticFunction::identity(), 0, "[3,4]", 5)).is_err());
        assert!(exact_measure(&query(ArithmeticFunction::identity(), 2, "[3,4]", 1)).is_err());
        let mc = DeviationQuery::monte_carlo(ArithmeticFunction::identity(), 2, "[3,4]".parse().unwrap(), 10, 1);
        assert!(exact_measure(&mc).is_err());
    }
}
