//! Pressure brackets, Legendre-transform rate functions and the Lyapunov
//! spectrum on digit-capped subsystems.
//!
//! Every quantity here is a cap-`B` lower-bound family: it describes the
//! subsystem of points with all digits at most `B`, not the full map.

pub mod legendre;
pub mod pressure;
pub mod spectrum;

pub use legendre::{
    default_q_grid, lambda_curve, minimizer_scan, rate_from_legendre, rate_function_table, LambdaCurve, MinimizerRow,
    RateFunctionTable, RateValue,
};
pub use pressure::{
    geometric_pressure_bracket, pressure_bracket, pressure_bracket_with, PressureBracket, PressureConfig,
    PressureMethod,
};
pub use spectrum::{lyapunov_spectrum, SpectrumConfig, SpectrumRow, SpectrumTable};

/// Lower bound on `min f` over `[xs[0], xs[last]]` for a convex `f` known only
/// through `lo[i] ≤ f(xs[i]) ≤ hi[i]`.
///
/// On each grid segment `f` lies above the chords of its neighbouring
/// segments extended inward, so the bound is the lowest point of the upper
/// envelope of those two lines. With only two grid points no chord exists and
/// the smaller endpoint bound is returned.
pub(crate) fn convex_min_lower_bound(xs: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let n = xs.len();
    debug_assert!(n == lo.len() && n == hi.len());
    match n {
        0 => return f64::INFINITY,
        1 => return lo[0],
        _ => {}
    }
    let mut best = f64::INFINITY;
    for i in 0..n - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        // Left line: through (x_{i−1}, hi) and (x_i, lo), valid for x ≥ x_i.
        let left = (i > 0).then(|| line(xs[i - 1], hi[i - 1], a, lo[i]));
        // Right line: through (x_{i+1}, lo) and (x_{i+2}, hi), valid for x ≤ x_{i+1}.
        let right = (i + 2 < n).then(|| line(xs[i + 2], hi[i + 2], b, lo[i + 1]));
        let envelope = |x: f64| {
            let mut v = f64::NEG_INFINITY;
            if let Some((s, c)) = left {
                v = v.max(s * x + c);
            }
            if let Some((s, c)) = right {
                v = v.max(s * x + c);
            }
            v
        };
        let mut seg = match (left, right) {
            (None, None) => lo[i].min(lo[i + 1]),
            _ => envelope(a).min(envelope(b)),
        };
        if let (Some((s1, c1)), Some((s2, c2))) = (left, right) {
            if s1 != s2 {
                let x = (c2 - c1) / (s1 - s2);
                if a < x && x < b {
                    seg = seg.min(envelope(x));
                }
            }
        }
        best = best.min(seg);
    }
    best
}

// Slope and intercept of the line through (x0, y0) and (x1, y1).
fn line(x0: f64, y0: f64, x1: f64, y1: f64) -> (f64, f64) {
    let s = (y1 - y0) / (x1 - x0);
    (s, y1 - s * x1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_bound_is_sound_and_tight_for_exact_values() {
        let f = |x: f64| (x - 0.37).powi(2);
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1 - 1.0).collect();
        let v: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let b = convex_min_lower_bound(&xs, &v, &v);
        assert!(b <= 0.0 + 1e-15);
        assert!(b > -0.01);
        let lo: Vec<f64> = v.iter().map(|x| x - 0.01).collect();
        let hi: Vec<f64> = v.iter().map(|x| x + 0.01).collect();
        assert!(convex_min_lower_bound(&xs, &lo, &hi) <= -0.01);
    }

    #[test]
    fn convex_bound_on_linear_function() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let v = [3.0, 2.0, 1.0, 0.0];
        assert_eq!(convex_min_lower_bound(&xs, &v, &v), 0.0);
    }
}
