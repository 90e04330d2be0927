//! Monte Carlo deviation measure on the dyadic grid `x = m/2⁶⁴`.
//!
//! Digits of a dyadic rational are extracted exactly with 128-bit integers.
//! Samples are drawn in fixed blocks, each from its own ChaCha stream, so the
//! result depends only on the seed and not on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{validate, DeviationCounts, DeviationEstimate, DeviationMethod, DeviationQuery, Mass, SumTest};
use crate::error::{Error, Result};
use crate::renyi::small_fraction_digits;

/// Samples per independent stream.
pub const MC_BLOCK: u64 = 1 << 16;

/// Digits up to this value use a lookup table for ψ.
const TABLE_DIGITS: u128 = 4096;

pub fn mc_measure(query: &DeviationQuery) -> Result<DeviationEstimate> {
    validate(query)?;
    let DeviationMethod::MonteCarlo { samples, seed } = query.method else {
        return Err(Error::invalid("mc_measure needs a Monte Carlo query"));
    };
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let psi = &query.psi;
    let n = query.n;
    let test = SumTest::new(psi, n, &query.target);
    let table: Vec<f64> = (0..=TABLE_DIGITS).map(|d| if d < 2 { 0.0 } else { psi.eval(d) }).collect();
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let count = MC_BLOCK.min(samples - block * MC_BLOCK);
            let mut digits = Vec::with_capacity(n);
            let mut hits = 0u64;
            for _ in 0..count {
                let m: u64 = rng.random();
                small_fraction_digits(m as u128, 1u128 << 64, n, &mut digits);
                let sum: f64 =
                    digits.iter().map(|&d| if d <= TABLE_DIGITS { table[d as usize] } else { psi.eval(d) }).sum();
                hits += test.contains_sum(sum) as u64;
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(DeviationEstimate {
        lower: Mass::Approx(p),
        upper: Mass::Approx(p),
        tail_unresolved: Mass::Approx(se),
        outside: None,
        counts: DeviationCounts { nodes: 0, runs: 0, samples, hits },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviation::exact_measure;
    use crate::digit_stats::ArithmeticFunction;

    fn mc(psi: ArithmeticFunction, n: usize, j: &str, samples: u64, seed: u64) -> DeviationEstimate {
        mc_measure(&DeviationQuery::monte_carlo(psi, n, j.parse().unwrap(), samples, seed)).unwrap()
    }

    #[test]
    fn agrees_with_exact_single_digit() {
        let e = mc(ArithmeticFunction::identity(), 1, "[3,4]", 1_000_000, 7);
        let se = (0.25f64 * 0.75 / 1e6).sqrt();
        assert!((e.lower.to_f64() - 0.25).abs() < 4.0 * se, "{e:?}");
    }

    #[test]
    fn trivial_targets() {
        assert_eq!(mc(ArithmeticFunction::identity(), 6, "[2,inf)", 5000, 1).counts.hits, 5000);
        assert_eq!(mc(ArithmeticFunction::identity(), 6, "(-inf,1.99]", 5000, 1).counts.hits, 0);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let a = mc(ArithmeticFunction::logarithm(), 5, "[ln(3),inf)", 200_000, 42);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc(ArithmeticFunction::logarithm(), 5, "[ln(3),inf)", 200_000, 42));
        assert_eq!(a.counts, b.counts);
        let c = mc(ArithmeticFunction::logarithm(), 5, "[ln(3),inf)", 200_000, 43);
        assert_ne!(a.counts.hits, c.counts.hits);
    }

    #[test]
    fn within_exact_bracket() {
        let psi = ArithmeticFunction::identity();
        let j = "[5/2,3]";
        let ex = exact_measure(&DeviationQuery::exact(psi.clone(), 3, j.parse().unwrap(), 20)).unwrap();
        let e = mc(psi, 3, j, 400_000, 3);
        let se = e.tail_unresolved.to_f64();
        assert!(e.lower.to_f64() >= ex.lower.to_f64() - 4.0 * se);
        assert!(e.lower.to_f64() <= ex.upper.to_f64() + 4.0 * se);
    }

    #[test]
    fn rejects_zero_samples() {
        let q = DeviationQuery::monte_carlo(ArithmeticFunction::identity(), 1, "[3,4]".parse().unwrap(), 0, 1);
        assert!(mc_measure(&q).is_err());
    }
}
