//! Exact arithmetic and rigorous numerics for backward continued fraction
//! digits of the Rényi map `T x = 1/(1−x) mod 1`.
//!
//! * [`renyi`]: the map, digits, inverse branches and cylinders, exactly.
//! * [`digit_stats`]: arithmetic functions on digits and Birkhoff means.
//! * [`measures`]: finitely described invariant measures and their entropy,
//!   Lyapunov exponent brackets, `F = h − χ` and dimension.
//! * [`thermo`]: pressure brackets on digit-capped subsystems, Legendre
//!   rate functions and the Lyapunov spectrum.
//! * [`deviation`]: exact and Monte Carlo measures of deviation sets and
//!   explicit polynomial-decay witnesses.

// `!(x >= 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deviation;
pub mod digit_stats;
pub mod error;
pub mod measures;
pub mod moebius;
pub mod numeric;
pub mod rational;
pub mod renyi;
pub mod thermo;

pub use deviation::{
    bn_measure, estimate, exact_measure, exact_measure_with, mc_measure, rate_fit, BnWitness, DeviationEstimate,
    DeviationMethod, DeviationQuery, Endpoint, ExactConfig, Mass, RateFit, TargetInterval,
};
pub use digit_stats::{
    birkhoff_mean, birkhoff_record, digit_frequency, three_means, ArithmeticFunction, BirkhoffRecord, ThreeMeans,
};
pub use error::{Error, Result};
pub use measures::{
    entropy, lyapunov_bracket, stats, theorem_c_sequence, DigitMarkovMeasure, FixedPointAtom, Measure, MeasureStats,
    MixtureMeasure, TheoremCConfig, TheoremCStep,
};
pub use moebius::MoebiusMap;
pub use numeric::Interval;
pub use rational::ExactRational;
pub use renyi::{
    cylinder, derivative, digit_at, digits, distortion_budget, distortion_budget_f64, inverse_branch, renyi_apply,
    renyi_iterate, thaler_c, word_map, CylinderInterval, Digit, DigitWord,
};
pub use thermo::{
    geometric_pressure_bracket, lyapunov_spectrum, minimizer_scan, pressure_bracket, pressure_bracket_with,
    rate_function_table, PressureBracket, PressureConfig, PressureMethod, SpectrumConfig, SpectrumTable,
};

/// Library version, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
