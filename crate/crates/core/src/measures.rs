//! Finitely described `T`-invariant measures and their statistics.
//!
//! A digit-Markov measure on `{2, …, B}` is the pushforward of a stationary
//! Markov chain on digits through the coding map. Its Lyapunov exponent
//! `χ = ∫ log T′` is only ever reported as a rigorous interval.

use rayon::prelude::*;
use serde::Serialize;

use crate::digit_stats::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Interval};
use crate::renyi::{Digit, Mat2};

/// Default cap on the number of words enumerated by [`lyapunov_bracket`].
pub const DEFAULT_WORD_LIMIT: u64 = 20_000_000;

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-12;

/// Stationary Markov chain on the digits `{2, …, cap}`.
///
/// `transition[i][j]` is the probability of digit `j + 2` following digit `i + 2`.
#[derive(Clone, Debug, Serialize)]
pub struct DigitMarkovMeasure {
    cap: Digit,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl DigitMarkovMeasure {
    /// Validates a row-stochastic matrix and solves for a stationary vector.
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self> {
        let size = transition.len();
        if size == 0 {
            return Err(Error::invalid("transition matrix is empty"));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != size {
                return Err(Error::invalid(format!("row {i} has {} entries, expected {size}", row.len())));
            }
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::invalid(format!("row {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::invalid(format!("row {i} sums to {s}, not 1")));
            }
        }
        let stationary = stationary_vector(&transition);
        Ok(DigitMarkovMeasure { cap: size as Digit + 1, transition, stationary })
    }

    /// I.i.d. digits with the given probabilities on `{2, …, cap}`.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        let mut m = Self::new(vec![probs.to_vec(); probs.len()])?;
        m.stationary = probs.to_vec();
        Ok(m)
    }

    /// Bernoulli measure on `{2, 3}` with weight `w` on digit 3.
    pub fn bernoulli_two_three(w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid(format!("weight {w} outside [0, 1]")));
        }
        Self::bernoulli(&[1.0 - w, w])
    }

    /// Uniform Bernoulli measure on `{2, …, cap}`.
    pub fn uniform(cap: Digit) -> Result<Self> {
        if cap < 2 {
            return Err(Error::InvalidDigit(cap as i64));
        }
        let k = (cap - 1) as usize;
        Self::bernoulli(&vec![1.0 / k as f64; k])
    }

    /// The fixed point of the digit-`k` branch, as a chain that always emits `k`.
    pub fn constant_digit(k: Digit) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDigit(k as i64));
        }
        let size = (k - 1) as usize;
        let mut row = vec![0.0; size];
        row[size - 1] = 1.0;
        Self::bernoulli(&row)
    }

    pub fn cap(&self) -> Digit {
        self.cap
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// `‖πP − π‖_∞`.
    pub fn stationary_residual(&self) -> f64 {
        let n = self.stationary.len();
        (0..n)
            .map(|j| {
                let pj: f64 = (0..n).map(|i| self.stationary[i] * self.transition[i][j]).sum();
                (pj - self.stationary[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    fn support_size(&self) -> usize {
        self.stationary.iter().filter(|&&p| p > 0.0).count()
    }
}

// Power iteration on the lazy chain (P + I)/2, which shares the stationary
// vectors of P and is aperiodic.
fn stationary_vector(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let mut next = vec![0.0; n];
        for (i, row) in p.iter().enumerate() {
            let half = 0.5 * pi[i];
            next[i] += half;
            for (j, &pij) in row.iter().enumerate() {
                next[j] += half * pij;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if delta < STATIONARY_TOL * 1e-2 {
            break;
        }
    }
    pi
}

/// Unit mass at the fixed point `p_k` of `T` inside the digit-`k` cylinder.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FixedPointAtom {
    pub k: Digit,
    pub point: f64,
    pub chi: f64,
}

impl FixedPointAtom {
    pub fn new(k: Digit) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDigit(k as i64));
        }
        let kf = k as f64;
        // 1 − p_k = 2/(k + √(k² − 4)), written to avoid cancellation.
        let root = ((kf - 2.0) * (kf + 2.0)).sqrt();
        let one_minus = 2.0 / (kf + root);
        Ok(FixedPointAtom { k, point: 1.0 - one_minus, chi: -2.0 * one_minus.ln() })
    }
}

/// Finite convex combination of measures.
#[derive(Clone, Debug, Serialize)]
pub struct MixtureMeasure {
    components: Vec<(f64, Measure)>,
}

impl MixtureMeasure {
    /// Components with zero weight are dropped; the rest must be positive
    /// and sum to 1.
    pub fn new(components: Vec<(f64, Measure)>) -> Result<Self> {
        if components.iter().any(|(w, _)| !(*w >= 0.0)) {
            return Err(Error::invalid("mixture weights must be nonnegative"));
        }
        let components: Vec<_> = components.into_iter().filter(|(w, _)| *w > 0.0).collect();
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.is_empty() || (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(MixtureMeasure { components })
    }

    pub fn components(&self) -> &[(f64, Measure)] {
        &self.components
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    Markov(DigitMarkovMeasure),
    Atom(FixedPointAtom),
    Mixture(MixtureMeasure),
}

impl From<DigitMarkovMeasure> for Measure {
    fn from(m: DigitMarkovMeasure) -> Self {
        Measure::Markov(m)
    }
}

impl From<FixedPointAtom> for Measure {
    fn from(m: FixedPointAtom) -> Self {
        Measure::Atom(m)
    }
}

impl From<MixtureMeasure> for Measure {
    fn from(m: MixtureMeasure) -> Self {
        Measure::Mixture(m)
    }
}

/// Entropy rate `−Σ_i π_i Σ_j P_ij log P_ij` in nats.
pub fn entropy(m: &DigitMarkovMeasure) -> f64 {
    let mut acc = CompensatedSum::new();
    for (pi, row) in m.stationary.iter().zip(&m.transition) {
        for &p in row {
            if p > 0.0 {
                acc.add(-pi * p * p.ln());
            }
        }
    }
    acc.value().max(0.0)
}

/// Rigorous bracket for `χ(m)` from depth-`depth` cylinders.
///
/// Two enclosures are intersected. On a word `w` with branch matrix
/// `[[a, b], [c, d]]`, `log (Tⁿ)′` ranges over `[2 log d, 2 log(c + d)]`;
/// and `log T′(x) = 2 log(b₁ − 1 + Tx)` with `Tx` in the cylinder of the
/// remaining `depth − 1` digits.
pub fn lyapunov_bracket(m: &DigitMarkovMeasure, depth: usize) -> Result<Interval> {
    lyapunov_bracket_with_limit(m, depth, DEFAULT_WORD_LIMIT)
}

pub fn lyapunov_bracket_with_limit(m: &DigitMarkovMeasure, depth: usize, max_words: u64) -> Result<Interval> {
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let support = m.support_size() as f64;
    let needed = support.powi(depth as i32);
    if needed > max_words as f64 {
        let fit = ((max_words as f64).ln() / support.ln()).floor().max(1.0);
        return Err(Error::Budget {
            what: "lyapunov bracket enumeration",
            needed,
            limit: max_words as f64,
            suggestion: format!("depth <= {fit}"),
        });
    }
    if (m.cap as f64).powi(depth as i32 + 1) > 1e36 {
        return Err(Error::Budget {
            what: "lyapunov bracket matrix entries",
            needed: (m.cap as f64).powi(depth as i32 + 1),
            limit: 1e36,
            suggestion: "a smaller depth or digit cap".into(),
        });
    }
    let size = m.stationary.len();
    let n = depth as f64;
    let shards: Vec<[CompensatedSum; 4]> = if depth == 1 {
        vec![leaf_terms(m, None, &Mat2::IDENTITY, 1.0)]
    } else {
        (0..size)
            .into_par_iter()
            .map(|head| {
                let mut acc = [CompensatedSum::new(); 4];
                if m.stationary.iter().zip(&m.transition).any(|(pi, row)| pi * row[head] > 0.0) {
                    let start = Mat2::IDENTITY.then_branch(head as Digit + 2).expect("bounded above");
                    walk(m, head, head, start, 1.0, depth - 2, &mut acc);
                }
                acc
            })
            .collect()
    };
    let mut totals = [CompensatedSum::new(); 4];
    for s in &shards {
        for (t, v) in totals.iter_mut().zip(s) {
            t.add(v.value());
        }
    }
    let birkhoff = Interval::new(totals[0].value() / n, totals[1].value() / n).widened(1e-12, 1e-15);
    let conditional = Interval::new(totals[2].value(), totals[3].value()).widened(1e-12, 1e-15);
    Ok(birkhoff
        .intersect(&conditional)
        .unwrap_or_else(|| Interval::new(birkhoff.lo.min(conditional.lo), birkhoff.hi.max(conditional.hi))))
}

// DFS over the suffix `w' = b₂ … b_n`; `head` is the index of b₂, `mat` the
// branch matrix of the digits placed so far and `prob` their transition product.
fn walk(
    m: &DigitMarkovMeasure,
    head: usize,
    last: usize,
    mat: Mat2,
    prob: f64,
    remaining: usize,
    acc: &mut [CompensatedSum; 4],
) {
    if remaining == 0 {
        let terms = leaf_terms(m, Some(head), &mat, prob);
        for (a, t) in acc.iter_mut().zip(terms) {
            a.add(t.value());
        }
        return;
    }
    for (j, &p) in m.transition[last].iter().enumerate() {
        if p > 0.0 {
            let next = mat.then_branch(j as Digit + 2).expect("bounded above");
            walk(m, head, j, next, prob * p, remaining - 1, acc);
        }
    }
}

// Weighted bracket terms of every word `b₁·w'`, summed over the first digit.
// Slots: Birkhoff lower/upper, conditional lower/upper.
fn leaf_terms(m: &DigitMarkovMeasure, head: Option<usize>, mat: &Mat2, prob: f64) -> [CompensatedSum; 4] {
    let mut acc = [CompensatedSum::new(); 4];
    let lo = mat.b as f64 / mat.d as f64;
    let hi = (mat.a + mat.b) as f64 / (mat.c + mat.d) as f64;
    for (i, (&pi, row)) in m.stationary.iter().zip(&m.transition).enumerate() {
        let w = pi * head.map_or(1.0, |h| row[h]) * prob;
        if w <= 0.0 {
            continue;
        }
        let k = (i + 1) as u128; // b₁ − 1
        let d = (mat.b + k * mat.d) as f64;
        let cd = (mat.a + k * mat.c) as f64 + d;
        acc[0].add(w * 2.0 * d.ln());
        acc[1].add(w * 2.0 * cd.ln());
        acc[2].add(w * 2.0 * (k as f64 + lo).ln());
        acc[3].add(w * 2.0 * (k as f64 + hi).ln());
    }
    acc
}

/// Statistics of an invariant measure. `dim` is `None` when the χ bracket
/// does not exclude 0.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureStats {
    pub h: f64,
    pub chi: Interval,
    pub f: Interval,
    pub dim: Option<Interval>,
    pub psi_integral: f64,
}

impl MeasureStats {
    fn from_parts(h: f64, chi: Interval, psi_integral: f64) -> Self {
        let f = chi.sub_from(h);
        // h ≤ χ, so the ratio never exceeds 1.
        let dim = (chi.lo > 0.0).then(|| Interval::new((h / chi.hi).min(1.0), (h / chi.lo).min(1.0)));
        MeasureStats { h, chi, f, dim, psi_integral }
    }
}

/// Entropy, χ bracket at `depth`, `F = h − χ`, dimension and `∫ψ∘b₁`.
pub fn stats(m: &Measure, psi: &ArithmeticFunction, depth: usize) -> Result<MeasureStats> {
    let (h, chi, psi_integral) = raw_stats(m, psi, depth)?;
    Ok(MeasureStats::from_parts(h, chi, psi_integral))
}

fn raw_stats(m: &Measure, psi: &ArithmeticFunction, depth: usize) -> Result<(f64, Interval, f64)> {
    match m {
        Measure::Markov(mm) => {
            let integral =
                mm.stationary
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if *p > 0.0 { p * psi.eval(i as Digit + 2) } else { 0.0 });
            Ok((entropy(mm), lyapunov_bracket(mm, depth)?, integral.collect::<CompensatedSum>().value()))
        }
        Measure::Atom(a) => Ok((0.0, Interval::point(a.chi).widened(1e-14, 0.0), psi.eval(a.k))),
        Measure::Mixture(mix) => {
            let mut h = CompensatedSum::new();
            let (mut lo, mut hi) = (CompensatedSum::new(), CompensatedSum::new());
            let mut integral = CompensatedSum::new();
            for (w, c) in &mix.components {
                let (ch, cchi, cpsi) = raw_stats(c, psi, depth)?;
                h.add(w * ch);
                lo.add(w * cchi.lo);
                hi.add(w * cchi.hi);
                integral.add(w * cpsi);
            }
            Ok((h.value(), Interval::new(lo.value(), hi.value()), integral.value()))
        }
    }
}

/// Settings for [`theorem_c_sequence`].
#[derive(Clone, Debug, Serialize)]
pub struct TheoremCConfig {
    /// Largest digit searched for `n_k`.
    pub n_max: u64,
    /// Cylinder depth for the χ brackets.
    pub depth: usize,
}

impl Default for TheoremCConfig {
    fn default() -> Self {
        TheoremCConfig { n_max: 10_000_000, depth: 12 }
    }
}

/// One member `μ_k = (1 − 1/r_k) ν_k + (1/r_k) δ_{n_k}` with diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremCStep {
    pub k: usize,
    pub n_k: u64,
    /// `√k · log n_k` before clamping.
    pub r_k_raw: f64,
    /// `max(r_k_raw, 1)`, so that `1/r_k` is a valid weight.
    pub r_k: f64,
    /// Required lower bound `1/√(r_k / log n_k)` on `χ(ν_k)`.
    pub chi_threshold: f64,
    /// Weight of digit 3 in the Bernoulli measure `ν_k` on `{2, 3}`.
    pub nu_weight: f64,
    pub nu_chi: Interval,
    pub atom_chi: f64,
    /// `ψ(n_k)/r_k`, a lower bound for `∫ψ dμ_k` when `ψ ≥ 0`.
    pub psi_floor: f64,
    pub stats: MeasureStats,
    #[serde(skip)]
    pub measure: MixtureMeasure,
}

/// Builds the measures `μ_1 … μ_K` whose `F` tends to 0 while `∫ψ` diverges.
///
/// `n_0 = 2`, `n_k` is the least `n ≥ n_{k−1}` with `ψ(n)/log n ≥ k`, and
/// `ν_k` is the Bernoulli measure on `{2, 3}` with the least weight on 3
/// (found by bisection) whose χ bracket clears the threshold.
pub fn theorem_c_sequence(
    psi: &ArithmeticFunction,
    count: usize,
    config: &TheoremCConfig,
) -> Result<Vec<TheoremCStep>> {
    let mut steps = Vec::with_capacity(count);
    let mut n_prev: u64 = 2;
    for k in 1..=count {
        let n_k = (n_prev..=config.n_max.max(2))
            .find(|&n| psi.eval(n as Digit) / (n as f64).ln() >= k as f64)
            .ok_or_else(|| Error::GrowthCriterionNotMet { psi: psi.name().to_string(), k, n_max: config.n_max })?;
        n_prev = n_k;
        let log_n = (n_k as f64).ln();
        let r_k_raw = (k as f64).sqrt() * log_n;
        let r_k = r_k_raw.max(1.0);
        let chi_threshold = 1.0 / (r_k / log_n).sqrt();
        let (nu_weight, nu_chi) = tune_nu(chi_threshold, config.depth)?;
        let atom = FixedPointAtom::new(n_k as Digit)?;
        let nu = DigitMarkovMeasure::bernoulli_two_three(nu_weight)?;
        let measure = MixtureMeasure::new(vec![(1.0 - 1.0 / r_k, nu.into()), (1.0 / r_k, atom.into())])?;
        let stats = stats(&Measure::Mixture(measure.clone()), psi, config.depth)?;
        steps.push(TheoremCStep {
            k,
            n_k,
            r_k_raw,
            r_k,
            chi_threshold,
            nu_weight,
            nu_chi,
            atom_chi: atom.chi,
            psi_floor: psi.eval(n_k as Digit) / r_k,
            stats,
            measure,
        });
    }
    Ok(steps)
}

fn tune_nu(threshold: f64, depth: usize) -> Result<(f64, Interval)> {
    let chi = |w: f64| lyapunov_bracket(&DigitMarkovMeasure::bernoulli_two_three(w)?, depth);
    let top = chi(1.0)?;
    if top.lo < threshold {
        return Err(Error::invalid(format!(
            "no Bernoulli measure on {{2,3}} has chi above {threshold} at depth {depth}"
        )));
    }
    let (mut lo, mut hi, mut best) = (0.0, 1.0, top);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let c = chi(mid)?;
        if c.lo >= threshold {
            hi = mid;
            best = c;
        } else {
            lo = mid;
        }
    }
    Ok((hi, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&DigitMarkovMeasure::constant_digit(5).unwrap()), 0.0);
        assert!(close(entropy(&DigitMarkovMeasure::uniform(3).unwrap()), 2f64.ln(), 1e-15));
        let p: f64 = 0.3;
        let m = DigitMarkovMeasure::bernoulli_two_three(0.7).unwrap();
        assert!(close(entropy(&m), -p * p.ln() - (1.0 - p) * (1.0 - p).ln(), 1e-15));
    }

    #[test]
    fn stationary_vector_of_periodic_chain() {
        let m = DigitMarkovMeasure::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(m.stationary_residual() < 1e-10);
        assert!(close(m.stationary()[0], 0.5, 1e-10));
        let m = DigitMarkovMeasure::new(vec![vec![0.9, 0.1, 0.0], vec![0.2, 0.3, 0.5], vec![0.4, 0.0, 0.6]]).unwrap();
        assert!(m.stationary_residual() < 1e-10);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(DigitMarkovMeasure::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(DigitMarkovMeasure::new(vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(DigitMarkovMeasure::new(vec![vec![1.0]]).is_ok());
    }

    #[test]
    fn fixed_points() {
        let a = FixedPointAtom::new(3).unwrap();
        assert!(close(a.chi, -2.0 * ((3.0 - 5f64.sqrt()) / 2.0).ln(), 1e-14));
        assert!(close(a.chi, 1.9248473002384139, 1e-12));
        assert_eq!(FixedPointAtom::new(2).unwrap().chi, 0.0);
        for k in 3..200u128 {
            let a = FixedPointAtom::new(k).unwrap();
            let kf = k as f64;
            assert!(1.0 - 1.0 / (kf - 1.0) <= a.point && a.point < 1.0 - 1.0 / kf);
            let tx = 1.0 / (1.0 - a.point) - (kf - 1.0);
            assert!(close(tx, a.point, 1e-10), "k = {k}");
        }
    }

    #[test]
    fn lyapunov_brackets_contain_atom_values() {
        let two = lyapunov_bracket(&DigitMarkovMeasure::constant_digit(2).unwrap(), 6).unwrap();
        assert!(two.contains(0.0));
        let three = lyapunov_bracket(&DigitMarkovMeasure::constant_digit(3).unwrap(), 10).unwrap();
        assert!(three.contains(FixedPointAtom::new(3).unwrap().chi));
        assert!(three.width() < 1e-3);
    }

    #[test]
    fn bracket_width_shrinks_with_depth_and_respects_budget() {
        let m = DigitMarkovMeasure::new(vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]]).unwrap();
        let mut prev: Option<Interval> = None;
        for depth in 1..=8 {
            let b = lyapunov_bracket(&m, depth).unwrap();
            let budget = 2.0 * crate::renyi::distortion_budget_f64(depth as u64) / depth as f64;
            assert!(b.width() <= budget, "depth {depth}: {} > {budget}", b.width());
            if let Some(p) = prev {
                assert!(b.width() <= p.width() + 1e-12);
                assert!(b.intersects(&p));
            }
            prev = Some(b);
        }
        assert!(lyapunov_bracket_with_limit(&m, 20, 1000).unwrap_err().is_budget());
    }

    #[test]
    fn stats_examples() {
        let id = ArithmeticFunction::identity();
        let s = stats(&DigitMarkovMeasure::constant_digit(2).unwrap().into(), &id, 5).unwrap();
        assert_eq!((s.h, s.psi_integral), (0.0, 2.0));
        assert!(s.chi.contains(0.0) && s.f.contains(0.0) && s.dim.is_none());

        let s = stats(&FixedPointAtom::new(3).unwrap().into(), &id, 5).unwrap();
        assert_eq!((s.h, s.psi_integral), (0.0, 3.0));
        assert!(s.f.contains(-1.9248473002384139));
        assert_eq!(s.dim.unwrap().hi, 0.0);
    }

    #[test]
    fn mixture_stats_are_affine() {
        let psi = ArithmeticFunction::logarithm();
        let nu: Measure = DigitMarkovMeasure::bernoulli_two_three(0.4).unwrap().into();
        let atom: Measure = FixedPointAtom::new(7).unwrap().into();
        let w = 0.3;
        let mix: Measure = MixtureMeasure::new(vec![(1.0 - w, nu.clone()), (w, atom.clone())]).unwrap().into();
        let (a, b, m) = (stats(&nu, &psi, 8).unwrap(), stats(&atom, &psi, 8).unwrap(), stats(&mix, &psi, 8).unwrap());
        assert!(close(m.h, (1.0 - w) * a.h + w * b.h, 1e-15));
        assert!(close(m.psi_integral, (1.0 - w) * a.psi_integral + w * b.psi_integral, 1e-15));
        assert!(close(m.chi.lo, (1.0 - w) * a.chi.lo + w * b.chi.lo, 1e-14));
        assert!(close(m.chi.hi, (1.0 - w) * a.chi.hi + w * b.chi.hi, 1e-14));
    }

    #[test]
    fn theorem_c_search_for_identity() {
        let steps =
            theorem_c_sequence(&ArithmeticFunction::identity(), 8, &TheoremCConfig { depth: 10, ..Default::default() })
                .unwrap();
        let n: Vec<u64> = steps.iter().map(|s| s.n_k).collect();
        assert_eq!(n, vec![2, 2, 5, 9, 13, 17, 22, 27]);
        for s in &steps {
            assert!(s.nu_chi.lo >= s.chi_threshold);
            assert!(s.stats.psi_integral >= s.psi_floor - 1e-12);
            assert!(s.stats.f.hi <= 1e-9);
        }
    }

    #[test]
    fn theorem_c_reports_failing_growth() {
        let err = theorem_c_sequence(&ArithmeticFunction::logarithm(), 2, &TheoremCConfig { n_max: 1000, depth: 4 })
            .unwrap_err();
        assert!(matches!(err, Error::GrowthCriterionNotMet { k: 2, .. }));
    }
}
