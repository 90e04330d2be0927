//! Rigorous brackets for the pressure of `q·ψ∘b₁ − t·log T′` on the
//! subsystem of points whose digits never exceed a cap `B`.
//!
//! For a word `w` with branch matrix `[[a, b], [c, d]]` the weight
//! `|g_w′(y)|^t = (c·y + d)^{−2t}` lies between `d^{−2t}` and `(c + d)^{−2t}`.
//! The sum of the larger weight over depth-`k` words is submultiplicative in
//! `k` and the sum of the smaller is supermultiplicative, so for every `k`
//!
//! ```text
//! (1/k) log Z_k^inf  ≤  P_B  ≤  (1/k) log Z_k^sup .
//! ```
//!
//! The sums are computed by exact enumeration when `(B−1)^k` is small and
//! otherwise by a recursion on the ratio `r = c/d`. Appending digit `b`
//! multiplies `d` by `r(b−2) + b − 1` and sends `r` to
//! `(r + 1)/(r(b−2) + b − 1)`, both increasing in `r`. The remaining-sum
//! function of `r` is therefore monotone (decreasing for `t > 0`), and a grid
//! in `s = log(1 + r)` bounds it both ways by rounding to the neighbour on the
//! conservative side.
//!
//! For `t ≥ 0` the grid tables also give sub- and super-solutions of the
//! transfer operator `L v(r) = Σ_b e^{qψ(b)} (r(b−2)+b−1)^{−2t} v(r′_b(r))`.
//! A positive non-increasing step function `v` with `L v ≤ ρ v` on every grid
//! cell (the last cell reaching to infinity) gives `P_B ≤ log ρ`; a
//! nonnegative one supported on the grid with `L v ≥ ρ′ v` gives
//! `P_B ≥ log ρ′`. Each bracket end is the better of the two certificates.

use rayon::prelude::*;
use serde::Serialize;

use crate::digit_stats::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::numeric::{Interval, LogSumExp};
use crate::renyi::{Digit, Mat2};

/// How partition sums are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMethod {
    /// Enumerate when `(B−1)^n` is within the enumeration limit, else recurse.
    Auto,
    Enumerate,
    Transfer,
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureConfig {
    pub method: PressureMethod,
    /// Number of points on the `log(1 + r)` grid.
    pub grid_size: usize,
    /// Largest number of words enumerated.
    pub enumeration_limit: f64,
    /// Largest `depth · grid_size · (B − 1)` for the recursion.
    pub work_limit: f64,
}

impl Default for PressureConfig {
    fn default() -> Self {
        PressureConfig { method: PressureMethod::Auto, grid_size: 2048, enumeration_limit: 2e6, work_limit: 4e9 }
    }
}

/// Bracket `[lower, upper]` for the cap-`B` pressure `Λ_B(q)` at geometric
/// exponent `t`, valid for the limit, from sums up to depth `depth`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureBracket {
    pub q: f64,
    pub t: f64,
    pub cap: Digit,
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
    /// Depth whose sum gave `lower`.
    pub lower_depth: usize,
    /// Depth whose sum gave `upper`.
    pub upper_depth: usize,
    /// `lower` comes from a transfer-operator sub-solution rather than a sum.
    pub lower_from_ratio: bool,
    /// `upper` comes from a transfer-operator super-solution rather than a sum.
    pub upper_from_ratio: bool,
    pub method: PressureMethod,
}

impl PressureBracket {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Pressure bracket for `q·ψ∘b₁ + t·φ` with `φ = −log T′`.
pub fn pressure_bracket(psi: &ArithmeticFunction, q: f64, t: f64, cap: Digit, depth: usize) -> Result<PressureBracket> {
    pressure_bracket_with(Some(psi), q, t, cap, depth, &PressureConfig::default())
}

/// Pressure of `t·φ` alone.
pub fn geometric_pressure_bracket(
    t: f64,
    cap: Digit,
    depth: usize,
    config: &PressureConfig,
) -> Result<PressureBracket> {
    pressure_bracket_with(None, 0.0, t, cap, depth, config)
}

pub fn pressure_bracket_with(
    psi: Option<&ArithmeticFunction>,
    q: f64,
    t: f64,
    cap: Digit,
    depth: usize,
    config: &PressureConfig,
) -> Result<PressureBracket> {
    if cap < 2 {
        return Err(Error::InvalidDigit(cap as i64));
    }
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    if !q.is_finite() || !t.is_finite() {
        return Err(Error::invalid("q and t must be finite"));
    }
    let weights: Vec<f64> =
        (2..=cap).map(|b| if q == 0.0 { 0.0 } else { q * psi.map_or(0.0, |f| f.eval(b)) }).collect();
    if let Some(b) = weights.iter().position(|w| !w.is_finite()) {
        return Err(Error::invalid(format!("q·psi({}) is not finite", b + 2)));
    }
    let words = ((cap - 1) as f64).powi(depth as i32);
    let method = config.method;
    let enumeration_fits = words <= config.enumeration_limit && (cap as f64 + 1.0).powi(depth as i32 + 1) <= 1e36;
    if method == PressureMethod::Enumerate && !enumeration_fits {
        let fit = (config.enumeration_limit.ln() / ((cap - 1) as f64).ln()).floor().max(1.0);
        return Err(budget("pressure enumeration", words, config.enumeration_limit, cap, fit as usize));
    }
    let mut levels = Vec::new();
    if method == PressureMethod::Enumerate || (config.method == PressureMethod::Auto && enumeration_fits) {
        levels.push(enumerate(&weights, t, depth));
    }
    if method == PressureMethod::Transfer || config.method == PressureMethod::Auto {
        let work = depth as f64 * config.grid_size as f64 * (cap - 1) as f64;
        if work > config.work_limit {
            let fit = (config.work_limit / (config.grid_size as f64 * (cap - 1) as f64)).floor().max(1.0);
            return Err(budget("pressure recursion", work, config.work_limit, cap, fit as usize));
        }
        levels.push(transfer(&weights, t, depth, config.grid_size.max(16)));
    }
    let method = if levels.len() == 2 { PressureMethod::Auto } else { method };
    Ok(finish(q, t, cap, depth, method, &levels))
}

fn budget(what: &'static str, needed: f64, limit: f64, cap: Digit, depth: usize) -> Error {
    Error::Budget { what, needed, limit, suggestion: format!("B = {cap} with depth <= {depth}, or a smaller B") }
}

/// Per-depth results of one evaluation route.
struct Level {
    /// `(log Z_k^inf, log Z_k^sup)` for `k = 1, …, depth`.
    sums: Vec<(f64, f64)>,
    /// Best `(log ρ′, log ρ)` from transfer-operator certificates, if any.
    ratio: Option<(f64, f64)>,
}

fn finish(q: f64, t: f64, cap: Digit, depth: usize, method: PressureMethod, routes: &[Level]) -> PressureBracket {
    let mut b = PressureBracket {
        q,
        t,
        cap,
        depth,
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
        lower_depth: 0,
        upper_depth: 0,
        lower_from_ratio: false,
        upper_from_ratio: false,
        method,
    };
    for route in routes {
        for (i, &(lo, hi)) in route.sums.iter().enumerate() {
            let k = (i + 1) as f64;
            if lo / k > b.lower {
                (b.lower, b.lower_depth, b.lower_from_ratio) = (lo / k, i + 1, false);
            }
            if hi / k < b.upper {
                (b.upper, b.upper_depth, b.upper_from_ratio) = (hi / k, i + 1, false);
            }
        }
        if let Some((lo, hi)) = route.ratio {
            if lo > b.lower {
                (b.lower, b.lower_from_ratio) = (lo, true);
            }
            if hi < b.upper {
                (b.upper, b.upper_from_ratio) = (hi, true);
            }
        }
    }
    // Absorbs floating-point rounding in the log-sum-exp reductions.
    b.lower -= 1e-12 * (1.0 + b.lower.abs());
    b.upper += 1e-12 * (1.0 + b.upper.abs());
    b
}

/// `(inf, sup)` of `log|g_w′|^t` over `[0, 1]` given `log d` and `log(c + d)`.
#[inline]
fn weight_range(t: f64, log_d: f64, log_cd: f64) -> (f64, f64) {
    let (x, y) = (-2.0 * t * log_d, -2.0 * t * log_cd);
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

fn enumerate(weights: &[f64], t: f64, depth: usize) -> Level {
    let shards: Vec<Vec<(LogSumExp, LogSumExp)>> = (0..weights.len())
        .into_par_iter()
        .map(|j| {
            let mut acc = vec![(LogSumExp::default(), LogSumExp::default()); depth];
            let m = Mat2::IDENTITY.then_branch(j as Digit + 2).expect("bounded");
            visit(weights, t, m, weights[j], 1, depth, &mut acc);
            acc
        })
        .collect();
    let sums = (0..depth)
        .map(|k| {
            let (mut lo, mut hi) = (LogSumExp::default(), LogSumExp::default());
            for s in &shards {
                lo.merge(&s[k].0);
                hi.merge(&s[k].1);
            }
            (lo.value(), hi.value())
        })
        .collect();
    Level { sums, ratio: None }
}

fn visit(weights: &[f64], t: f64, m: Mat2, s: f64, len: usize, depth: usize, acc: &mut [(LogSumExp, LogSumExp)]) {
    let (lo, hi) = weight_range(t, (m.d as f64).ln(), ((m.c + m.d) as f64).ln());
    acc[len - 1].0.add(s + lo);
    acc[len - 1].1.add(s + hi);
    if len < depth {
        for (j, &w) in weights.iter().enumerate() {
            let next = m.then_branch(j as Digit + 2).expect("bounded");
            visit(weights, t, next, s + w, len + 1, depth, acc);
        }
    }
}

/// Grid recursion. `Φ_k(r)` is the weighted sum over `k` further digits
/// from ratio state `r`, normalised by the current `d^{−2t}`; `Z_k = Φ_k(0)`.
fn transfer(weights: &[f64], t: f64, depth: usize, grid: usize) -> Level {
    let s_max = (2.0 * depth as f64 + 3.0).ln();
    let h = s_max / (grid - 1) as f64;
    let r_of = |i: usize| (i as f64 * h).exp_m1();
    let nb = weights.len();

    // Per digit and grid point: log growth factor of d, and the successor
    // ratio as (exact s′, floor index).
    struct Step {
        log_factor: f64,
        s_next: f64,
        floor: usize,
    }
    let steps: Vec<Vec<Step>> = (0..nb)
        .into_par_iter()
        .map(|j| {
            let b = (j + 2) as f64;
            (0..grid)
                .map(|i| {
                    let r = r_of(i);
                    let f = r * (b - 2.0) + b - 1.0;
                    let s_next = ((r + 1.0) / f).ln_1p();
                    let floor = ((s_next / h).floor() as usize).min(grid - 1);
                    Step { log_factor: f.ln(), s_next, floor }
                })
                .collect()
        })
        .collect();

    // Which neighbour bounds Φ from above: for t ≥ 0 Φ is non-increasing in r.
    let decreasing = t >= 0.0;
    let lookup = |table: &[f64], st: &Step, upper: bool| -> f64 {
        let exact = (st.floor as f64 * h - st.s_next).abs() <= 1e-15 * (1.0 + st.s_next);
        let idx_left = st.floor;
        let idx_right = if exact { st.floor } else { st.floor + 1 };
        let want_left = upper == decreasing;
        let idx = if want_left { idx_left } else { idx_right };
        if idx >= grid {
            if upper {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            table[idx]
        }
    };

    // Level 1 in closed form: final weight ratio (1 + r′)^{−2t}, its bound
    // on the matching side of 1, or (for `None`) the exact-length weight
    // (1 + r′)^{−t}.
    let level_one = |upper: Option<bool>| -> Vec<f64> {
        (0..grid)
            .into_par_iter()
            .map(|i| {
                let mut acc = LogSumExp::default();
                for (j, st) in steps.iter().enumerate() {
                    let st = &st[i];
                    let tail = -2.0 * t * st.s_next;
                    let fin = match upper {
                        Some(true) => tail.max(0.0),
                        Some(false) => tail.min(0.0),
                        None => tail / 2.0,
                    };
                    acc.add(weights[j] - 2.0 * t * st.log_factor + fin);
                }
                acc.value()
            })
            .collect()
    };
    // Certificates from a table `v` (log values on the grid), t ≥ 0 only.
    // Upper: v made non-increasing, right-continuous steps, constant past the
    // grid; every term of L v is non-increasing in r, so each cell's worst
    // case sits at its left end.
    let ratio_upper = |table: &[f64]| -> f64 {
        let mut v = table.to_vec();
        for i in 1..grid {
            v[i] = v[i].min(v[i - 1]);
        }
        if !v.iter().all(|x| x.is_finite()) {
            return f64::INFINITY;
        }
        (0..grid)
            .into_par_iter()
            .map(|i| {
                let mut acc = LogSumExp::default();
                for (j, st) in steps.iter().enumerate() {
                    let st = &st[i];
                    let idx = (((st.s_next - 1e-12) / h).floor().max(0.0) as usize).min(grid - 1);
                    acc.add(weights[j] - 2.0 * t * st.log_factor + v[idx]);
                }
                acc.value() - v[i]
            })
            .reduce(|| f64::NEG_INFINITY, f64::max)
    };
    // Lower: v non-increasing on cells 0..grid−2 and zero from the last grid
    // point on; each cell's worst case is the left limit at its right end.
    let ratio_lower = |table: &[f64]| -> f64 {
        let mut v = table.to_vec();
        for i in 1..grid {
            v[i] = v[i].min(v[i - 1]);
        }
        v[grid - 1] = f64::NEG_INFINITY;
        if !v[0].is_finite() {
            return f64::NEG_INFINITY;
        }
        (0..grid - 1)
            .into_par_iter()
            .filter(|&i| v[i].is_finite())
            .map(|i| {
                let mut acc = LogSumExp::default();
                for (j, st) in steps.iter().enumerate() {
                    let st = &st[i + 1];
                    let idx = (((st.s_next + 1e-12) / h).ceil() as usize).saturating_sub(1).min(grid - 1);
                    acc.add(weights[j] - 2.0 * t * st.log_factor + v[idx]);
                }
                acc.value() - v[i]
            })
            .reduce(|| f64::INFINITY, f64::min)
    };
    let certify = |up: &[f64], lo: &[f64]| -> (f64, f64) {
        if t >= 0.0 {
            (ratio_lower(lo), ratio_upper(up))
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    };

    // Test functions for the certificates: partition sums weighted by exact
    // cylinder lengths, interpolated between grid points. They need no
    // rounding; any positive v yields a valid certificate.
    let interpolate = |table: &[f64], st: &Step| -> f64 {
        let i = st.floor;
        if i + 1 >= grid {
            return table[grid - 1];
        }
        let frac = (st.s_next / h - i as f64).clamp(0.0, 1.0);
        table[i] + frac * (table[i + 1] - table[i])
    };
    let mut mid = level_one(None);
    let mut up = level_one(Some(true));
    let mut lo = level_one(Some(false));
    let mut sums = Vec::with_capacity(depth);
    sums.push((lo[0], up[0]));
    let mut ratio = certify(&mid, &mid);
    for _ in 2..=depth {
        let next = |prev: &[f64], upper: Option<bool>| -> Vec<f64> {
            (0..grid)
                .into_par_iter()
                .map(|i| {
                    let mut acc = LogSumExp::default();
                    for (j, st) in steps.iter().enumerate() {
                        let st = &st[i];
                        let v = match upper {
                            Some(u) => lookup(prev, st, u),
                            None => interpolate(prev, st),
                        };
                        acc.add(weights[j] - 2.0 * t * st.log_factor + v);
                    }
                    acc.value()
                })
                .collect()
        };
        up = next(&up, Some(true));
        lo = next(&lo, Some(false));
        mid = next(&mid, None);
        sums.push((lo[0], up[0]));
        let (rl, ru) = certify(&mid, &mid);
        ratio = (ratio.0.max(rl), ratio.1.min(ru));
    }
    Level { sums, ratio: Some(ratio) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(method: PressureMethod) -> PressureConfig {
        PressureConfig { method, ..Default::default() }
    }

    #[test]
    fn depth_one_contains_exact_partition_sum() {
        let id = ArithmeticFunction::identity();
        for cap in [2u128, 3, 7, 40, 500] {
            let p = pressure_bracket(&id, 0.0, 1.0, cap, 1).unwrap();
            let exact = (1.0 - 1.0 / cap as f64).ln();
            assert!(p.lower <= exact && exact <= p.upper, "B = {cap}: {p:?}");
        }
    }

    #[test]
    fn all_two_subsystem_has_zero_pressure() {
        let id = ArithmeticFunction::identity();
        for n in [1usize, 4, 9] {
            let p = pressure_bracket(&id, 0.0, 1.0, 2, n).unwrap();
            let depth_n_sum = (1.0 / (n as f64 + 1.0)).ln() / n as f64;
            assert!(p.lower <= depth_n_sum && p.upper >= 0.0, "{p:?}");
            let tr = pressure_bracket_with(Some(&id), 0.0, 1.0, 2, n, &cfg(PressureMethod::Transfer)).unwrap();
            assert!(tr.lower <= 0.0 && tr.upper >= 0.0);
        }
    }

    #[test]
    fn transfer_agrees_with_enumeration() {
        let psi = ArithmeticFunction::reciprocal();
        for &(q, t, cap, n) in
            &[(0.0, 1.0, 5u128, 6usize), (-3.0, 1.0, 6, 5), (4.0, 0.7, 4, 7), (0.0, -0.8, 5, 6), (1.5, 0.0, 3, 5)]
        {
            let e = pressure_bracket_with(Some(&psi), q, t, cap, n, &cfg(PressureMethod::Enumerate)).unwrap();
            let tr = pressure_bracket_with(Some(&psi), q, t, cap, n, &cfg(PressureMethod::Transfer)).unwrap();
            // Both are rigorous, so they must overlap.
            assert!(tr.interval().intersects(&e.interval()), "{e:?} vs {tr:?}");
            assert!(tr.width() <= e.width() + 0.05, "{e:?} vs {tr:?}");
        }
    }

    #[test]
    fn geometric_pressure_at_one_is_zero() {
        // P_B(1) = 0: δ₀ gives ≥ 0 and the full system has pressure 0.
        for cap in [3u128, 10, 40] {
            let p = geometric_pressure_bracket(1.0, cap, 8, &cfg(PressureMethod::Transfer)).unwrap();
            assert!(p.interval().contains(0.0), "{p:?}");
            assert!(p.upper < 0.05, "{p:?}");
        }
    }

    #[test]
    fn zero_exponent_counts_words() {
        let p = geometric_pressure_bracket(0.0, 6, 5, &PressureConfig::default()).unwrap();
        assert!(p.interval().contains(5f64.ln()));
        assert!(p.width() < 1e-9);
    }

    #[test]
    fn budget_errors_suggest_parameters() {
        let tight = PressureConfig { enumeration_limit: 100.0, work_limit: 1e3, ..Default::default() };
        let e = pressure_bracket_with(
            None,
            0.0,
            1.0,
            40,
            8,
            &PressureConfig { method: PressureMethod::Enumerate, ..tight.clone() },
        );
        assert!(e.unwrap_err().is_budget());
        assert!(pressure_bracket_with(None, 0.0, 1.0, 40, 8, &tight).unwrap_err().is_budget());
    }
}
