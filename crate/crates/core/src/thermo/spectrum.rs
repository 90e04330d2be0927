//! Lyapunov spectrum of the cap-`B` subsystem,
//! `ℒ_B(α) = max((1/α) inf_t (P_B(t) + tα), 1/2)`, where `P_B(t)` is the
//! pressure of `−t log T′`.

use rayon::prelude::*;
use serde::Serialize;

use super::convex_min_lower_bound;
use super::pressure::{geometric_pressure_bracket, PressureConfig};
use crate::error::{Error, Result};
use crate::renyi::Digit;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumConfig {
    /// Increasing grid of geometric exponents; should end at `t = 1`.
    pub t_grid: Vec<f64>,
    pub pressure: PressureConfig,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            t_grid: (0..=140).map(|i| -6.0 + 0.05 * i as f64).collect(),
            pressure: PressureConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectrumRow {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    /// `α ≥ 2 log B`: beyond every Lyapunov exponent of the subsystem.
    pub out_of_range: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumTable {
    pub cap: Digit,
    pub depth: usize,
    pub rows: Vec<SpectrumRow>,
}

/// Bracketed `ℒ_B` on `alpha_grid ⊂ (0, ∞)`. Values lie in `[1/2, 1]`.
///
/// `P_B ≥ 0` everywhere (the neutral fixed point has zero entropy and zero
/// exponent), so the infimum over `t` beyond the grid's right end is at
/// least `t_max·α`; beyond the left end the convex extension is used.
pub fn lyapunov_spectrum(
    cap: Digit,
    depth: usize,
    alpha_grid: &[f64],
    config: &SpectrumConfig,
) -> Result<SpectrumTable> {
    if let Some(a) = alpha_grid.iter().find(|a| !(**a > 0.0)) {
        return Err(Error::invalid(format!("spectrum needs alpha > 0, got {a}")));
    }
    let ts = &config.t_grid;
    if ts.len() < 3 || ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("t grid must be strictly increasing with at least three points"));
    }
    let brackets: Vec<_> =
        ts.par_iter().map(|&t| geometric_pressure_bracket(t, cap, depth, &config.pressure)).collect::<Result<_>>()?;
    let p_lo: Vec<f64> = brackets.iter().map(|b| b.lower.max(0.0)).collect();
    let p_hi: Vec<f64> = brackets.iter().map(|b| b.upper).collect();
    let ceiling = 2.0 * (cap as f64).ln();
    let t_max = *ts.last().expect("non-empty");
    let rows = alpha_grid
        .iter()
        .map(|&alpha| {
            let g_lo: Vec<f64> = ts.iter().zip(&p_lo).map(|(t, p)| p + t * alpha).collect();
            let g_hi: Vec<f64> = ts.iter().zip(&p_hi).map(|(t, p)| p + t * alpha).collect();
            let upper_inf = g_hi.iter().copied().fold(f64::INFINITY, f64::min);
            let mut lower_inf = convex_min_lower_bound(ts, &g_lo, &g_hi).min(t_max * alpha);
            // Left of the grid: g ≥ g(t₀) + (chord slope)(t − t₀), unbounded
            // below unless the first chord certifies growth to the left.
            if g_lo[0] < g_hi[1] {
                lower_inf = f64::NEG_INFINITY;
            }
            let clamp = |x: f64| (x / alpha).clamp(0.5, 1.0);
            SpectrumRow { alpha, lower: clamp(lower_inf), upper: clamp(upper_inf), out_of_range: alpha >= ceiling }
        })
        .collect();
    Ok(SpectrumTable { cap, depth, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{entropy, lyapunov_bracket, DigitMarkovMeasure};

    #[test]
    fn spectrum_is_monotone_and_floored() {
        let alphas: Vec<f64> = (1..=12).map(|i| 0.4 * i as f64).collect();
        let table = lyapunov_spectrum(6, 8, &alphas, &SpectrumConfig::default()).unwrap();
        for w in table.rows.windows(2) {
            assert!(w[1].lower <= w[0].upper + 1e-12, "{w:?}");
        }
        for r in &table.rows {
            assert!(0.5 <= r.lower && r.lower <= r.upper && r.upper <= 1.0);
        }
        assert!(table.rows.last().unwrap().out_of_range == (4.8 >= 2.0 * 6f64.ln()));
    }

    #[test]
    fn measure_dimension_below_spectrum() {
        // dim μ ≤ ℒ_B(χ(μ)) for any μ carried by the cap-B subsystem.
        let m = DigitMarkovMeasure::uniform(4).unwrap();
        let chi = lyapunov_bracket(&m, 8).unwrap();
        let dim_lo = entropy(&m) / chi.hi;
        let table = lyapunov_spectrum(4, 8, &[chi.lo], &SpectrumConfig::default()).unwrap();
        assert!(dim_lo <= table.rows[0].upper + 1e-9, "{dim_lo} vs {:?}", table.rows[0]);
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        assert!(lyapunov_spectrum(5, 3, &[0.0], &SpectrumConfig::default()).is_err());
    }
}
