//! Subcommand arguments and their tables.
//!
//! Arguments stay in textual form (ψ specs, intervals, grids) so that the
//! manifest records exactly what was asked for and can be replayed.

use std::path::PathBuf;

use bcf_core::{
    bn_measure, digits, estimate, exact_measure_with, geometric_pressure_bracket, inverse_branch, lyapunov_spectrum,
    pressure_bracket_with, rate_fit, rate_function_table, theorem_c_sequence, ArithmeticFunction, DeviationQuery,
    DigitWord, ExactConfig, ExactRational, PressureConfig, PressureMethod, SpectrumConfig, TargetInterval,
    TheoremCConfig,
};
use clap::{Args, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{Cell, Table};
use crate::CliError;

#[derive(Subcommand, Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Digits of a rational point with running harmonic, geometric and arithmetic means.
    Expand(ExpandArgs),
    /// Exact cylinder endpoints and lengths of digit words.
    Cylinder(CylinderArgs),
    /// Thaler's sequence c_n = g₂ⁿ(1/2).
    Thaler(ThalerArgs),
    /// Measure of {x : mean of ψ over n digits ∈ J}, exactly or by Monte Carlo.
    Deviation(DeviationArgs),
    /// Explicit witness sets B_n and their polynomial decay fit.
    BnBound(BnArgs),
    /// Pressure brackets on the digit-capped subsystem.
    Pressure(PressureArgs),
    /// Rate function brackets by Legendre transform.
    Rate(RateArgs),
    /// Lyapunov spectrum brackets.
    Spectrum(SpectrumArgs),
    /// Measures with F → 0 while ∫ψ grows.
    Theoremc(TheoremCArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    /// Default output file stem.
    pub fn stem(&self) -> &'static str {
        match self {
            Command::Expand(_) => "expand",
            Command::Cylinder(_) => "cylinder",
            Command::Thaler(_) => "thaler",
            Command::Deviation(_) => "deviation",
            Command::BnBound(_) => "bn-bound",
            Command::Pressure(_) => "pressure",
            Command::Rate(_) => "rate",
            Command::Spectrum(_) => "spectrum",
            Command::Theoremc(_) => "theoremc",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ExpandArgs {
    /// Point in [0, 1) as p/q, integer or finite decimal.
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct CylinderArgs {
    /// Comma-separated digits, e.g. 2,3,5; repeat for several words.
    #[arg(long = "word", required = true)]
    pub words: Vec<String>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ThalerArgs {
    /// Last index.
    #[arg(long)]
    pub n: u64,
    /// First index.
    #[arg(long, default_value_t = 0)]
    pub from: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DevMethod {
    Exact,
    Mc,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct DeviationArgs {
    /// Preset (identity, logarithm, reciprocal, prime) or table `2:1,3:5;0`.
    #[arg(long, default_value = "identity")]
    pub psi: String,
    /// Target interval: `a,b` (closed) or bracketed, e.g. `[5/2,3)`, `[ln(3),inf)`.
    #[arg(long = "J")]
    pub j: String,
    /// Window length or inclusive range `a..b`.
    #[arg(long)]
    pub n: String,
    #[arg(long, value_enum, default_value_t = DevMethod::Exact)]
    pub method: DevMethod,
    /// Digit cap for exact enumeration.
    #[arg(long, default_value_t = 20)]
    pub cap: u64,
    /// Monte Carlo samples per n.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Monte Carlo seed, shared by every n.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tree nodes allowed per exact run; exceeding it exits with status 3.
    #[arg(long)]
    pub node_limit: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct BnArgs {
    #[arg(long = "J", default_value = "3,4")]
    pub j: String,
    /// Window length or inclusive range `a..b`.
    #[arg(long, default_value = "3..200")]
    pub n: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PMethod {
    Auto,
    Enumerate,
    Transfer,
}

impl From<PMethod> for PressureMethod {
    fn from(m: PMethod) -> Self {
        match m {
            PMethod::Auto => PressureMethod::Auto,
            PMethod::Enumerate => PressureMethod::Enumerate,
            PMethod::Transfer => PressureMethod::Transfer,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct PressureOpts {
    #[arg(long, value_enum, default_value_t = PMethod::Auto)]
    pub method: PMethod,
    /// Ratio grid points for the transfer method.
    #[arg(long, default_value_t = 2048)]
    pub grid_size: usize,
}

impl PressureOpts {
    fn config(&self) -> PressureConfig {
        PressureConfig { method: self.method.into(), grid_size: self.grid_size, ..PressureConfig::default() }
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct PressureArgs {
    /// ψ for the potential q·ψ∘b₁ − t log T′; omit for the geometric potential alone.
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub cap: u64,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Grid `a:b:step` or list `x,y,…`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub q: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub t: String,
    #[command(flatten)]
    pub opts: PressureOpts,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct RateArgs {
    #[arg(long, default_value = "reciprocal")]
    pub psi: String,
    #[arg(long, default_value_t = 40)]
    pub cap: u64,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// α grid `a:b:step` or list.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// q grid; defaults to a symmetric geometric grid scaled to ψ's range.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Upper bound below which I(α) is reported as zero.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub opts: PressureOpts,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 30)]
    pub cap: u64,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// t grid; defaults to −6:1:0.05.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[command(flatten)]
    pub opts: PressureOpts,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct TheoremCArgs {
    #[arg(long, default_value = "identity")]
    pub psi: String,
    /// Number of measures K.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub n_max: u64,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ReplayArgs {
    /// A CSV sidecar manifest or a JSON output file.
    #[arg(long)]
    pub manifest: PathBuf,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let num = |t: &str| -> Result<f64, CliError> {
        let v: f64 = t.trim().parse().map_err(|_| invalid(format!("bad number {t:?} in grid {s:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(invalid(format!("non-finite value in grid {s:?}")))
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 || b < a {
                return Err(invalid(format!("grid {s:?} needs a <= b and step > 0")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(invalid(format!("grid {s:?} has more than a million points")));
            }
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(invalid(format!("grid {s:?} must be a:b:step or a comma list"))),
    }
}

/// `a..b` or `a..=b` (both inclusive), a comma list, or one integer.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| invalid(format!("bad integer {t:?} in {s:?}")));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if b < a {
            return Err(invalid(format!("empty range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

fn psi_of(spec: &str) -> Result<ArithmeticFunction, CliError> {
    Ok(ArithmeticFunction::parse(spec)?)
}

fn target_of(spec: &str) -> Result<TargetInterval, CliError> {
    Ok(spec.parse()?)
}

pub fn execute(cmd: &Command) -> Result<Table, CliError> {
    match cmd {
        Command::Expand(a) => expand(a),
        Command::Cylinder(a) => cylinder(a),
        Command::Thaler(a) => thaler(a),
        Command::Deviation(a) => deviation(a),
        Command::BnBound(a) => bn_bound(a),
        Command::Pressure(a) => pressure(a),
        Command::Rate(a) => rate(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Theoremc(a) => theoremc(a),
        Command::Replay(_) => Err(invalid("replay cannot be nested")),
    }
}

fn expand(a: &ExpandArgs) -> Result<Table, CliError> {
    let x: ExactRational = a.x.parse()?;
    let word = digits(&x, a.n)?;
    let mut t = Table::new(&["n", "digit", "harmonic", "geometric", "arithmetic"]);
    let (mut sum, mut recip, mut logs) = (BigInt::zero(), BigRational::zero(), 0.0f64);
    for (i, &d) in word.digits().iter().enumerate() {
        let n = i as u64 + 1;
        sum += BigInt::from(d);
        recip += BigRational::new(1.into(), BigInt::from(d));
        logs += (d as f64).ln();
        let arithmetic = ExactRational::from(BigRational::new(sum.clone(), BigInt::from(n)));
        let harmonic = ExactRational::from(BigRational::from_integer(BigInt::from(n)) / &recip);
        t.push(vec![n.into(), d.into(), (&harmonic).into(), (logs / n as f64).exp().into(), (&arithmetic).into()]);
    }
    Ok(t)
}

fn cylinder(a: &CylinderArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["word", "lo", "hi", "length", "length_f64"]);
    for w in &a.words {
        let word: DigitWord = w.parse()?;
        let c = bcf_core::cylinder(&word);
        let len = c.length();
        t.push(vec![Cell::Text(word.to_string()), (&c.lo).into(), (&c.hi).into(), (&len).into(), len.to_f64().into()]);
    }
    Ok(t)
}

fn thaler(a: &ThalerArgs) -> Result<Table, CliError> {
    if a.from > a.n {
        return Err(invalid("--from exceeds --n"));
    }
    let g2 = inverse_branch(2)?;
    let mut c = ExactRational::ratio(1, 2);
    let mut t = Table::new(&["n", "c_n", "n_times_c_n"]);
    for n in 0..=a.n {
        if n >= a.from {
            t.push(vec![n.into(), (&c).into(), (n as f64 * c.to_f64()).into()]);
        }
        c = g2.apply(&c)?;
    }
    Ok(t)
}

fn deviation(a: &DeviationArgs) -> Result<Table, CliError> {
    let psi = psi_of(&a.psi)?;
    let target = target_of(&a.j)?;
    let mut t = Table::new(&["n", "lower", "upper", "tail_unresolved", "outside", "nodes", "runs", "samples", "hits"]);
    for n in parse_range(&a.n)? {
        let n = n as usize;
        let q = match a.method {
            DevMethod::Exact => DeviationQuery::exact(psi.clone(), n, target.clone(), a.cap.into()),
            DevMethod::Mc => DeviationQuery::monte_carlo(psi.clone(), n, target.clone(), a.samples, a.seed),
        };
        let e = match (a.method, a.node_limit) {
            (DevMethod::Exact, Some(node_limit)) => {
                exact_measure_with(&q, &ExactConfig { node_limit, ..ExactConfig::default() })?
            }
            _ => estimate(&q)?,
        };
        let c = &e.counts;
        t.push(vec![
            n.into(),
            (&e.lower).into(),
            (&e.upper).into(),
            (&e.tail_unresolved).into(),
            e.outside.as_ref().map(Cell::from).unwrap_or(Cell::Empty),
            c.nodes.into(),
            c.runs.into(),
            c.samples.into(),
            c.hits.into(),
        ]);
    }
    Ok(t)
}

fn bn_bound(a: &BnArgs) -> Result<Table, CliError> {
    let target = target_of(&a.j)?;
    let mut t = Table::new(&["n", "z", "m", "lo", "hi", "measure", "measure_f64", "mean", "certified"]);
    let mut series = Vec::new();
    for n in parse_range(&a.n)? {
        let w = bn_measure(n, &target)?;
        let l = w.measure.to_f64();
        series.push((n as f64, l));
        t.push(vec![
            n.into(),
            w.z.into(),
            w.m.into(),
            (&w.lo).into(),
            (&w.hi).into(),
            (&w.measure).into(),
            l.into(),
            (&w.mean).into(),
            w.membership_certified.into(),
        ]);
    }
    if series.len() >= 4 {
        t.summary = Some(json!({ "fit": rate_fit(&series)? }));
    }
    Ok(t)
}

fn method_name(m: PressureMethod) -> &'static str {
    match m {
        PressureMethod::Auto => "auto",
        PressureMethod::Enumerate => "enumerate",
        PressureMethod::Transfer => "transfer",
    }
}

fn pressure(a: &PressureArgs) -> Result<Table, CliError> {
    let psi = a.psi.as_deref().map(psi_of).transpose()?;
    let cfg = a.opts.config();
    let (qs, ts) = (parse_grid(&a.q)?, parse_grid(&a.t)?);
    let mut t = Table::new(&[
        "q",
        "t",
        "lower",
        "upper",
        "lower_depth",
        "upper_depth",
        "lower_from_ratio",
        "upper_from_ratio",
        "method",
    ]);
    for &tt in &ts {
        for &q in &qs {
            let b = match &psi {
                Some(p) => pressure_bracket_with(Some(p), q, tt, a.cap.into(), a.depth, &cfg)?,
                None if q == 0.0 => geometric_pressure_bracket(tt, a.cap.into(), a.depth, &cfg)?,
                None => return Err(invalid("q != 0 needs --psi")),
            };
            t.push(vec![
                q.into(),
                tt.into(),
                b.lower.into(),
                b.upper.into(),
                b.lower_depth.into(),
                b.upper_depth.into(),
                b.lower_from_ratio.into(),
                b.upper_from_ratio.into(),
                Cell::Text(method_name(b.method).into()),
            ]);
        }
    }
    Ok(t)
}

fn rate(a: &RateArgs) -> Result<Table, CliError> {
    let psi = psi_of(&a.psi)?;
    let alphas = parse_grid(&a.alpha)?;
    let qs = a.q.as_deref().map(parse_grid).transpose()?;
    let table = rate_function_table(&psi, a.cap.into(), a.depth, &alphas, qs.as_deref(), &a.opts.config())?;
    let mut t = Table::new(&["alpha", "lower", "upper", "q_star", "infinite", "is_zero", "zero_possible"]);
    for r in &table.rows {
        t.push(vec![
            r.alpha.into(),
            r.lower.into(),
            r.upper.into(),
            r.q_star.into(),
            r.infinite.into(),
            (!r.infinite && r.upper <= a.tol).into(),
            (!r.infinite && r.lower <= a.tol).into(),
        ]);
    }
    Ok(t)
}

fn spectrum(a: &SpectrumArgs) -> Result<Table, CliError> {
    let alphas = parse_grid(&a.alpha)?;
    let mut cfg = SpectrumConfig { pressure: a.opts.config(), ..SpectrumConfig::default() };
    if let Some(ts) = &a.t {
        cfg.t_grid = parse_grid(ts)?;
    }
    let table = lyapunov_spectrum(a.cap.into(), a.depth, &alphas, &cfg)?;
    let mut t = Table::new(&["alpha", "lower", "upper", "out_of_range"]);
    for r in &table.rows {
        t.push(vec![r.alpha.into(), r.lower.into(), r.upper.into(), r.out_of_range.into()]);
    }
    Ok(t)
}

fn theoremc(a: &TheoremCArgs) -> Result<Table, CliError> {
    let psi = psi_of(&a.psi)?;
    let steps = theorem_c_sequence(&psi, a.k, &TheoremCConfig { n_max: a.n_max, depth: a.depth })?;
    let mut t = Table::new(&[
        "k",
        "n_k",
        "r_k",
        "chi_threshold",
        "nu_weight",
        "nu_chi_lo",
        "nu_chi_hi",
        "atom_chi",
        "psi_floor",
        "h",
        "chi_lo",
        "chi_hi",
        "f_lo",
        "f_hi",
        "dim_lo",
        "dim_hi",
        "psi_integral",
    ]);
    for s in &steps {
        let st = &s.stats;
        t.push(vec![
            s.k.into(),
            s.n_k.into(),
            s.r_k.into(),
            s.chi_threshold.into(),
            s.nu_weight.into(),
            s.nu_chi.lo.into(),
            s.nu_chi.hi.into(),
            s.atom_chi.into(),
            s.psi_floor.into(),
            st.h.into(),
            st.chi.lo.into(),
            st.chi.hi.into(),
            st.f.lo.into(),
            st.f.hi.into(),
            st.dim.map(|d| d.lo).into(),
            st.dim.map(|d| d.hi).into(),
            st.psi_integral.into(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_ranges() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.3,0.42").unwrap(), vec![0.3, 0.42]);
        assert_eq!(parse_grid("-1").unwrap(), vec![-1.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a").is_err());
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_range("7").unwrap(), vec![7]);
        assert_eq!(parse_range("1,4").unwrap(), vec![1, 4]);
        assert!(parse_range("5..2").is_err());
    }

    #[test]
    fn commands_round_trip_through_json() {
        let c = Command::Deviation(DeviationArgs {
            psi: "identity".into(),
            j: "3,4".into(),
            n: "1".into(),
            method: DevMethod::Exact,
            cap: 4,
            samples: 10,
            seed: 1,
            node_limit: None,
        });
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["subcommand"], "deviation");
        let back: Command = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&back).unwrap(), v);
    }
}
