//! Compound-loss engine: frequency–severity simulation, aggregate
//! distributions by Panjer recursion and FFT convolution, empirical and
//! approximate quantiles.
//!
//! A [`CompoundModel`] is a set of independent risk cells, each pairing an
//! annual Poisson event count with a severity distribution; the annual
//! aggregate loss is the sum of all event amounts across cells. Regulatory
//! capital is the 0.999 quantile of that aggregate.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionError, FrequencySpec, SeveritySampler, SeveritySpec};
use crate::rng::RngStream;

/// Severity tail mass below which Panjer drops trailing grid cells; the
/// dropped mass reappears in the aggregate truncation mass.
const PANJER_SUPPORT_TRIM: f64 = 1e-15;
/// `λ·(1 − f₀)` beyond which the Panjer seed `e^{−λ(1−f₀)}` underflows.
const PANJER_MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Error)]
pub enum LdaError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("a compound model needs at least one cell")]
    NoCells,
    #[error("empty sample set")]
    EmptySamples,
    #[error("quantile level must lie in (0, 1), got {0}")]
    QuantileLevel(f64),
    #[error("single-loss approximation undefined: (1 - {alpha})/{lambda} >= 1")]
    SlaDomain { alpha: f64, lambda: f64 },
    #[error("grid step must be > 0, got {0}")]
    GridStep(f64),
    #[error("grid size must be a power of two, got {0}")]
    GridSizeNotPowerOfTwo(usize),
    #[error("grid size must be >= 2, got {0}")]
    GridTooSmall(usize),
    #[error(
        "Panjer seed exp(-{exponent:.1}) underflows; enlarge the grid step so the \
         severity keeps mass at zero, or use the FFT path"
    )]
    PanjerUnderflow { exponent: f64 },
    #[error(
        "quantile {q} lies inside the truncation mass (grid covers {covered:.9}); \
         extend the grid to at least {needed} points"
    )]
    QuantileBeyondGrid { q: f64, covered: f64, needed: usize },
}

/// One simulated or ingested year of losses. Amounts are base UM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualLossRecord {
    pub year_index: i32,
    pub events: Vec<f64>,
    pub total: f64,
}

impl AnnualLossRecord {
    pub fn new(year_index: i32, events: Vec<f64>) -> Self {
        let total = events.iter().sum();
        Self {
            year_index,
            events,
            total,
        }
    }
}

/// Independent (frequency, severity) risk cells forming an annual-loss
/// generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompoundModel {
    pub cells: Vec<(FrequencySpec, SeveritySpec)>,
}

impl CompoundModel {
    pub fn new(cells: Vec<(FrequencySpec, SeveritySpec)>) -> Result<Self, LdaError> {
        if cells.is_empty() {
            return Err(LdaError::NoCells);
        }
        for (freq, sev) in &cells {
            freq.validate()?;
            sev.validate()?;
        }
        Ok(Self { cells })
    }

    pub fn single(freq: FrequencySpec, sev: SeveritySpec) -> Result<Self, LdaError> {
        Self::new(vec![(freq, sev)])
    }

    /// Analytic mean annual loss `Σ λ·E[X]`; infinite if any cell's
    /// severity mean diverges.
    pub fn mean_annual_loss(&self) -> f64 {
        self.cells
            .iter()
            .map(|(f, s)| f.lambda() * s.mean())
            .sum()
    }

    /// Simulate full per-event annual records.
    ///
    /// Each year draws from its own substream, so results are identical
    /// across thread counts and a run can be reproduced year by year.
    pub fn simulate_years(&self, years: usize, seed: u64) -> Vec<AnnualLossRecord> {
        let samplers: Vec<(FrequencySpec, SeveritySampler)> = self
            .cells
            .iter()
            .map(|(f, s)| (*f, SeveritySampler::new(*s)))
            .collect();
        let base = RngStream::root(seed);
        (0..years)
            .into_par_iter()
            .map(|year| {
                let mut rng = base.child(year as u64).rng();
                let mut events = Vec::new();
                for (freq, sampler) in &samplers {
                    let count = freq.draw(&mut rng);
                    events.reserve(count as usize);
                    for _ in 0..count {
                        events.push(sampler.draw(&mut rng));
                    }
                }
                AnnualLossRecord::new(year as i32, events)
            })
            .collect()
    }

    /// Simulate annual totals only; the cheap path for Monte Carlo
    /// quantiles over millions of years. Draws the same substreams as
    /// [`Self::simulate_years`].
    pub fn simulate_annual_totals(&self, years: usize, seed: u64) -> Vec<f64> {
        let samplers: Vec<(FrequencySpec, SeveritySampler)> = self
            .cells
            .iter()
            .map(|(f, s)| (*f, SeveritySampler::new(*s)))
            .collect();
        let base = RngStream::root(seed);
        (0..years)
            .into_par_iter()
            .map(|year| {
                let mut rng = base.child(year as u64).rng();
                let mut total = 0.0;
                for (freq, sampler) in &samplers {
                    let count = freq.draw(&mut rng);
                    for _ in 0..count {
                        total += sampler.draw(&mut rng);
                    }
                }
                total
            })
            .collect()
    }
}

/// Empirical quantile: the ⌈q·n⌉-th order statistic of the samples.
pub fn var_empirical(samples: &[f64], q: f64) -> Result<f64, LdaError> {
    if samples.is_empty() {
        return Err(LdaError::EmptySamples);
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(LdaError::QuantileLevel(q));
    }
    let n = samples.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    let mut work = samples.to_vec();
    let (_, v, _) = work.select_nth_unstable_by(rank - 1, |a, b| a.partial_cmp(b).unwrap());
    Ok(*v)
}

/// Single-loss approximation of a compound quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlaEstimate {
    /// Quantile term plus mean correction (quantile term alone when the
    /// correction is undefined).
    pub value: f64,
    /// Dominant-loss term `F⁻¹(1 − (1−α)/λ)`.
    pub quantile_term: f64,
    /// Mean correction `λ·E[X]`; `None` flags an infinite-mean severity.
    pub mean_term: Option<f64>,
}

/// `VaR_α ≈ F⁻¹(1 − (1−α)/λ) + λ·E[X]` for a single Poisson–severity cell.
///
/// Infinite-mean severities yield the quantile term with the
/// mean-correction-undefined flag rather than an error.
pub fn sla_var(
    alpha: f64,
    freq: &FrequencySpec,
    sev: &SeveritySpec,
) -> Result<SlaEstimate, LdaError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LdaError::QuantileLevel(alpha));
    }
    freq.validate()?;
    sev.validate()?;
    let lambda = freq.lambda();
    let tail = (1.0 - alpha) / lambda;
    if !(tail < 1.0) {
        return Err(LdaError::SlaDomain { alpha, lambda });
    }
    let quantile_term = sev.quantile(1.0 - tail)?;
    let mean = sev.mean();
    let mean_term = if mean.is_finite() {
        Some(lambda * mean)
    } else {
        None
    };
    Ok(SlaEstimate {
        value: quantile_term + mean_term.unwrap_or(0.0),
        quantile_term,
        mean_term,
    })
}

/// Aggregate annual-loss pmf on the grid {0, h, 2h, …}.
#[derive(Debug, Clone, Serialize)]
pub struct AggregatePmf {
    /// Grid step in base UM.
    pub step: f64,
    pub probabilities: Vec<f64>,
    /// Probability mass beyond the last grid point.
    pub truncation_mass: f64,
    /// For FFT output, a lower bound on the mass that wrapped around the
    /// circular convolution; 0 for Panjer.
    pub aliasing_mass: f64,
}

impl AggregatePmf {
    /// Smallest grid point whose CDF reaches `q`.
    pub fn quantile(&self, q: f64) -> Result<f64, LdaError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(LdaError::QuantileLevel(q));
        }
        let mut cdf = 0.0;
        for (k, p) in self.probabilities.iter().enumerate() {
            cdf += p;
            if cdf >= q {
                return Ok(k as f64 * self.step);
            }
        }
        Err(LdaError::QuantileBeyondGrid {
            q,
            covered: cdf,
            needed: self.probabilities.len() * 2,
        })
    }

    /// Mean of the on-grid mass.
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * self.step * p)
            .sum()
    }

    /// Total on-grid probability.
    pub fn covered_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Smallest grid point of `pmf` whose CDF reaches `q`.
pub fn quantile_from_pmf(pmf: &AggregatePmf, q: f64) -> Result<f64, LdaError> {
    pmf.quantile(q)
}

/// Mass-rounding discretization of a severity onto {0, h, …, (n−1)h}:
/// cell j receives the probability of ((j−½)h, (j+½)h]. Returns the cell
/// masses and the undiscretized tail beyond the grid.
pub fn discretize_severity(sev: &SeveritySpec, h: f64, n: usize) -> (Vec<f64>, f64) {
    let mut masses = Vec::with_capacity(n);
    let mut prev = 0.0; // F((j−½)h) from the previous cell; F(−h/2) = 0
    for j in 0..n {
        let upper = sev.cdf((j as f64 + 0.5) * h);
        masses.push((upper - prev).max(0.0));
        prev = upper;
    }
    (masses, (1.0 - prev).max(0.0))
}

fn validate_grid(h: f64, n: usize) -> Result<(), LdaError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(LdaError::GridStep(h));
    }
    if n < 2 {
        return Err(LdaError::GridTooSmall(n));
    }
    Ok(())
}

/// Compound-Poisson aggregate pmf by Panjer recursion.
///
/// With Poisson counts (`a = 0`, `b = λ` in the (a, b, 0) family) the
/// recursion is `p₀ = e^{−λ(1−f₀)}`, `p_k = (λ/k)·Σ_{j≥1} j·f_j·p_{k−j}`.
/// Severity grid cells whose collective tail mass is below 1e−15 are
/// dropped from the inner sum; the deficit shows up in the truncation
/// mass.
pub fn panjer_aggregate(
    freq: &FrequencySpec,
    sev: &SeveritySpec,
    h: f64,
    n: usize,
) -> Result<AggregatePmf, LdaError> {
    freq.validate()?;
    sev.validate()?;
    validate_grid(h, n)?;
    let lambda = freq.lambda();
    let (sev_masses, _) = discretize_severity(sev, h, n);

    let exponent = lambda * (1.0 - sev_masses[0]);
    if exponent > PANJER_MAX_EXPONENT {
        return Err(LdaError::PanjerUnderflow { exponent });
    }

    // trim the severity support where the remaining tail is negligible
    let mut suffix = 0.0;
    let mut support = 1;
    for j in (0..sev_masses.len()).rev() {
        suffix += sev_masses[j];
        if suffix > PANJER_SUPPORT_TRIM {
            support = j + 1;
            break;
        }
    }

    // weights λ·j·f_j for the inner convolution
    let weights: Vec<f64> = (1..support)
        .map(|j| lambda * j as f64 * sev_masses[j])
        .collect();

    let mut probs = vec![0.0; n];
    probs[0] = (-exponent).exp();
    for k in 1..n {
        let j_max = k.min(support - 1);
        let mut acc = 0.0;
        for j in 1..=j_max {
            acc += weights[j - 1] * probs[k - j];
        }
        probs[k] = acc / k as f64;
    }

    let covered: f64 = probs.iter().sum();
    Ok(AggregatePmf {
        step: h,
        probabilities: probs,
        truncation_mass: (1.0 - covered).max(0.0),
        aliasing_mass: 0.0,
    })
}

/// Compound-Poisson aggregate pmf by FFT: transform the discretized
/// severity, exponentiate `exp(λ(φ − 1))` in the transform domain, invert.
///
/// `n` must be a power of two. Mass beyond the grid wraps around; the
/// reported `aliasing_mass` is the probability that at least one event
/// exceeds the grid, a lower bound on the wrapped mass.
pub fn fft_aggregate(
    freq: &FrequencySpec,
    sev: &SeveritySpec,
    h: f64,
    n: usize,
) -> Result<AggregatePmf, LdaError> {
    freq.validate()?;
    sev.validate()?;
    validate_grid(h, n)?;
    if !n.is_power_of_two() {
        return Err(LdaError::GridSizeNotPowerOfTwo(n));
    }
    let lambda = freq.lambda();
    let (sev_masses, sev_tail) = discretize_severity(sev, h, n);

    let mut buf: Vec<Complex<f64>> = sev_masses
        .iter()
        .map(|&m| Complex::new(m, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for phi in buf.iter_mut() {
        *phi = (lambda * (*phi - Complex::new(1.0, 0.0))).exp();
    }
    planner.plan_fft_inverse(n).process(&mut buf);

    let scale = 1.0 / n as f64;
    let probs: Vec<f64> = buf.iter().map(|c| (c.re * scale).max(0.0)).collect();
    let covered: f64 = probs.iter().sum();
    Ok(AggregatePmf {
        step: h,
        probabilities: probs,
        truncation_mass: (1.0 - covered).max(0.0),
        aliasing_mass: -(-lambda * sev_tail).exp_m1(),
    })
}
