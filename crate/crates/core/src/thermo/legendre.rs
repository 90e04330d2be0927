//! Rate functions as Legendre transforms of bracketed pressure curves:
//! `I(α) = sup_q (qα − Λ(q))`, with the sup taken over the curve's q-range.

use rayon::prelude::*;
use serde::Serialize;

use super::convex_min_lower_bound;
use super::pressure::{pressure_bracket_with, PressureBracket, PressureConfig};
use crate::digit_stats::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::numeric::Interval;
use crate::renyi::Digit;

/// Samples `q ↦ [Λ_lo(q), Λ_hi(q)]` on an increasing grid, together with
/// the closed range of slopes `Λ` can have.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaCurve {
    pub q: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub slope_range: (f64, f64),
}

impl LambdaCurve {
    pub fn new(q: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, slope_range: (f64, f64)) -> Result<Self> {
        if q.len() < 2 || q.len() != lower.len() || q.len() != upper.len() {
            return Err(Error::invalid("a lambda curve needs at least two points with matching bounds"));
        }
        if q.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("q grid must be strictly increasing"));
        }
        Ok(LambdaCurve { q, lower, upper, slope_range })
    }

    /// Exact samples of a known function; the slope range is taken from the
    /// end chords.
    pub fn from_fn(q: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v: Vec<f64> = q.iter().map(|&x| f(x)).collect();
        let n = q.len();
        if n < 2 {
            return Err(Error::invalid("a lambda curve needs at least two points"));
        }
        let first = (v[1] - v[0]) / (q[1] - q[0]);
        let last = (v[n - 1] - v[n - 2]) / (q[n - 1] - q[n - 2]);
        Self::new(q, v.clone(), v, (first, last))
    }

    pub fn from_brackets(brackets: &[PressureBracket], slope_range: (f64, f64)) -> Result<Self> {
        Self::new(
            brackets.iter().map(|b| b.q).collect(),
            brackets.iter().map(|b| b.lower).collect(),
            brackets.iter().map(|b| b.upper).collect(),
            slope_range,
        )
    }
}

/// Bracket for `I(α)`; `infinite` marks α outside the slope range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateValue {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    /// Smallest grid q attaining the lower bound.
    pub q_star: f64,
    pub infinite: bool,
}

impl RateValue {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }
}

/// `0` followed by a symmetric geometric grid from `1e-2` to
/// `100/(max ψ − min ψ)` on `{2, …, B}` with ratio about 1.15.
pub fn default_q_grid(psi: &ArithmeticFunction, cap: Digit) -> Vec<f64> {
    let (lo, hi) = psi.range_capped(cap);
    let spread = if hi > lo { hi - lo } else { 1.0 };
    let q_max = (100.0 / spread).max(0.02);
    let steps = ((q_max / 1e-2).ln() / 1.15f64.ln()).ceil().max(1.0) as usize;
    let ratio = (q_max / 1e-2).powf(1.0 / steps as f64);
    let pos: Vec<f64> = (0..=steps).map(|i| 1e-2 * ratio.powi(i as i32)).collect();
    let mut grid: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    grid.push(0.0);
    grid.extend(pos);
    grid
}

/// Pressure brackets of `q·ψ∘b₁ + φ` along a q-grid.
pub fn lambda_curve(
    psi: &ArithmeticFunction,
    cap: Digit,
    depth: usize,
    q_grid: &[f64],
    config: &PressureConfig,
) -> Result<Vec<PressureBracket>> {
    q_grid.par_iter().map(|&q| pressure_bracket_with(Some(psi), q, 1.0, cap, depth, config)).collect()
}

/// Legendre transform of a bracketed curve at `α`, clipped below at 0.
///
/// The lower end is the grid maximum of `qα − Λ_hi(q)`. The upper end bounds
/// the supremum between grid points using convexity of `Λ`.
pub fn rate_from_legendre(curve: &LambdaCurve, alpha: f64) -> RateValue {
    let (smin, smax) = curve.slope_range;
    if !(smin <= alpha && alpha <= smax) {
        return RateValue { alpha, lower: f64::INFINITY, upper: f64::INFINITY, q_star: f64::NAN, infinite: true };
    }
    let mut lower = f64::NEG_INFINITY;
    let mut q_star = curve.q[0];
    for (&q, &hi) in curve.q.iter().zip(&curve.upper) {
        let v = q * alpha - hi;
        if v > lower {
            lower = v;
            q_star = q;
        }
    }
    // g(q) = Λ(q) − qα is convex; I ≤ −min g.
    let g_lo: Vec<f64> = curve.q.iter().zip(&curve.lower).map(|(q, l)| l - q * alpha).collect();
    let g_hi: Vec<f64> = curve.q.iter().zip(&curve.upper).map(|(q, h)| h - q * alpha).collect();
    let upper = -convex_min_lower_bound(&curve.q, &g_lo, &g_hi);
    RateValue { alpha, lower: lower.max(0.0), upper: upper.max(0.0), q_star, infinite: false }
}

/// `I_B` for `ψ` on an α-grid, labelled as a cap-`B` lower-bound family.
#[derive(Clone, Debug, Serialize)]
pub struct RateFunctionTable {
    pub psi: String,
    pub cap: Digit,
    pub depth: usize,
    pub rows: Vec<RateValue>,
}

pub fn rate_function_table(
    psi: &ArithmeticFunction,
    cap: Digit,
    depth: usize,
    alpha_grid: &[f64],
    q_grid: Option<&[f64]>,
    config: &PressureConfig,
) -> Result<RateFunctionTable> {
    let default;
    let q_grid = match q_grid {
        Some(g) => g,
        None => {
            default = default_q_grid(psi, cap);
            &default
        }
    };
    let brackets = lambda_curve(psi, cap, depth, q_grid, config)?;
    let curve = LambdaCurve::from_brackets(&brackets, psi.range_capped(cap))?;
    let rows = alpha_grid.iter().map(|&a| rate_from_legendre(&curve, a)).collect();
    Ok(RateFunctionTable { psi: psi.name().to_string(), cap, depth, rows })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MinimizerRow {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub infinite: bool,
    /// `upper ≤ tol`: the bracket certifies `I_B(α) ≈ 0`.
    pub is_zero: bool,
    /// `lower ≤ tol`: zero is not excluded.
    pub zero_possible: bool,
}

/// Rate-function brackets along `alpha_grid`, marking candidate minimizers.
pub fn minimizer_scan(
    psi: &ArithmeticFunction,
    cap: Digit,
    depth: usize,
    alpha_grid: &[f64],
    tol: f64,
    config: &PressureConfig,
) -> Result<Vec<MinimizerRow>> {
    let table = rate_function_table(psi, cap, depth, alpha_grid, None, config)?;
    Ok(table
        .rows
        .iter()
        .map(|r| MinimizerRow {
            alpha: r.alpha,
            lower: r.lower,
            upper: r.upper,
            infinite: r.infinite,
            is_zero: !r.infinite && r.upper <= tol,
            zero_possible: !r.infinite && r.lower <= tol,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_round_trip() {
        let q: Vec<f64> = (-4000..=4000).map(|i| i as f64 * 1e-3).collect();
        let curve = LambdaCurve::from_fn(q, |x| x * x / 2.0).unwrap();
        for &a in &[-2.0, -0.5, 0.0, 0.3, 1.7] {
            let r = rate_from_legendre(&curve, a);
            let exact = a * a / 2.0;
            assert!(r.lower <= exact + 1e-12 && exact <= r.upper + 1e-12, "{r:?}");
            assert!(r.upper - r.lower < 1e-3, "{r:?}");
        }
        assert!(rate_from_legendre(&curve, 5.0).infinite);
    }

    #[test]
    fn ties_pick_smallest_q() {
        let curve =
            LambdaCurve::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], (-1.0, 1.0)).unwrap();
        let r = rate_from_legendre(&curve, 0.0);
        assert_eq!((r.lower, r.q_star), (0.0, 0.0));
        let flat = LambdaCurve::new(vec![-1.0, 0.0, 1.0], vec![0.0; 3], vec![0.0; 3], (0.0, 0.0)).unwrap();
        assert_eq!(rate_from_legendre(&flat, 0.0).q_star, -1.0);
    }

    #[test]
    fn default_grid_is_symmetric_and_contains_zero() {
        let g = default_q_grid(&ArithmeticFunction::reciprocal(), 40);
        assert!(g.contains(&0.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let n = g.len();
        for i in 0..n {
            assert_eq!(g[i], -g[n - 1 - i]);
        }
        assert!((g[n - 1] - 100.0 / (0.5 - 1.0 / 40.0)).abs() < 1e-9);
    }

    #[test]
    fn zero_at_the_neutral_digit_value() {
        // α = ψ(2) is attained by the neutral fixed point, so I_B vanishes there.
        let psi = ArithmeticFunction::reciprocal();
        let table = rate_function_table(&psi, 8, 4, &[0.5], None, &PressureConfig::default()).unwrap();
        assert_eq!(table.rows[0].lower, 0.0);
    }
}
