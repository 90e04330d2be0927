//! Least-squares decay fits for series `(n, λ_n)`: exponential
//! `log λ = a + r·n`, polynomial `log λ = a + p·log n`, and both jointly.
//!
//! The reported rate and exponent come from the joint model, so a pure
//! power law yields `r ≈ 0` and a pure exponential `p ≈ 0`. The single-model
//! residuals tell the regimes apart.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Residual sum of squares in `log λ`.
    pub rss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    /// `r` of the joint model.
    pub exp_rate: f64,
    /// `p` of the joint model.
    pub poly_exponent: f64,
    /// `log λ` against `n`.
    pub exponential: LineFit,
    /// `log λ` against `log n`.
    pub polynomial: LineFit,
    /// `log λ = a + r·n + p·log n` as `(a, r, p)`.
    pub joint: (f64, f64, f64),
    pub joint_rss: f64,
    pub points: usize,
    /// Entries with `λ_n = 0`, which have no logarithm.
    pub dropped: usize,
}

fn line(xs: &[f64], ys: &[f64]) -> LineFit {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    LineFit { intercept, slope, rss }
}

/// Least squares for `y ≈ a + b·u + c·v` on centred data.
fn plane(us: &[f64], vs: &[f64], ys: &[f64]) -> ((f64, f64, f64), f64) {
    let k = us.len() as f64;
    let (mu, mv, my) = (us.iter().sum::<f64>() / k, vs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let (mut suu, mut svv, mut suv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((u, v), y) in us.iter().zip(vs).zip(ys) {
        let (u, v, y) = (u - mu, v - mv, y - my);
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suy += u * y;
        svy += v * y;
    }
    let det = suu * svv - suv * suv;
    let b = (suy * svv - svy * suv) / det;
    let c = (svy * suu - suy * suv) / det;
    let a = my - b * mu - c * mv;
    let rss = us.iter().zip(vs).zip(ys).map(|((u, v), y)| (y - a - b * u - c * v).powi(2)).sum();
    ((a, b, c), rss)
}

/// Fits a decay series. Needs at least four points with `λ_n > 0` and
/// distinct `n ≥ 1`.
pub fn rate_fit(series: &[(f64, f64)]) -> Result<RateFit> {
    if let Some((n, l)) = series.iter().find(|(n, l)| !(*n >= 1.0) || !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::invalid(format!("bad series point ({n}, {l}): need n >= 1 and finite lambda >= 0")));
    }
    let kept: Vec<(f64, f64)> = series.iter().copied().filter(|&(_, l)| l > 0.0).collect();
    let dropped = series.len() - kept.len();
    if kept.len() < 4 {
        return Err(Error::invalid(format!("rate fit needs at least 4 positive points, got {}", kept.len())));
    }
    let ns: Vec<f64> = kept.iter().map(|p| p.0).collect();
    if ns.iter().all(|&n| n == ns[0]) {
        return Err(Error::invalid("rate fit needs distinct n"));
    }
    let logn: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let exponential = line(&ns, &ys);
    let polynomial = line(&logn, &ys);
    let (joint, joint_rss) = plane(&ns, &logn, &ys);
    Ok(RateFit {
        exp_rate: joint.1,
        poly_exponent: joint.2,
        exponential,
        polynomial,
        joint,
        joint_rss,
        points: kept.len(),
        dropped,
    })
}
