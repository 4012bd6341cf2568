//! Standardised Measurement Approach capital.
//!
//! `BI`, `BIC`, `LC` and `K` are all expressed in millions of currency
//! units; individual loss events are in base units (UM). The business
//! indicator maps through a five-bucket piecewise-linear schedule to the
//! BI component (BIC), the ten-year loss history condenses into the loss
//! component (LC), and the two combine into the capital charge:
//!
//! ```text
//! K(BI, LC) = BIC                                   bucket 1
//!           = 110 + (BIC − 110)·ln(e − 1 + LC/BIC)  buckets 2–5
//! ```
//!
//! The dampened branch anchors at 110, the bucket-1 ceiling (0.11 × 1000),
//! which keeps K continuous at the first breakpoint and makes K = BIC an
//! identity when LC = BIC.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{FrequencySpec, SeveritySpec};
use crate::lda::AnnualLossRecord;
use crate::special::norm_cdf;
use crate::UM_PER_MILLION;

/// Default lower loss-component threshold: 10 million UM.
pub const DEFAULT_THRESHOLD_L: f64 = 1e7;
/// Default upper loss-component threshold: 100 million UM.
pub const DEFAULT_THRESHOLD_H: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmaError {
    #[error("business indicator must be >= 0, got {0}")]
    NegativeBi(f64),
    #[error("loss component must be >= 0, got {0}")]
    NegativeLc(f64),
    #[error("loss component {lc} requires a positive BI component, got BIC = 0")]
    ZeroBicWithLosses { lc: f64 },
    #[error("loss history is empty")]
    EmptyHistory,
    #[error("loss history spans {years} years; expected 5 to 10 (set the override to accept any length)")]
    HistoryLength { years: usize },
    #[error("thresholds must satisfy 0 <= L < H, got L = {l}, H = {h}")]
    BadThresholds { l: f64, h: f64 },
    #[error("event amounts must be >= 0")]
    NegativeEvent,
    #[error("severity has infinite mean; long-run loss component undefined")]
    InfiniteMean,
}

/// The five-bucket marginal schedule for the business-indicator component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BucketSchedule {
    /// Bucket upper breakpoints in millions (last bucket unbounded).
    pub breakpoints: [f64; 4],
    /// Marginal coefficients per bucket.
    pub marginal_coefficients: [f64; 5],
    /// BIC at each bucket's lower edge: cumulative marginal sums.
    pub base_amounts: [f64; 5],
}

/// The regulatory schedule: breakpoints at 1,000 / 3,000 / 10,000 / 30,000
/// millions with marginals 11%–29%.
pub const SCHEDULE: BucketSchedule = BucketSchedule {
    breakpoints: [1_000.0, 3_000.0, 10_000.0, 30_000.0],
    marginal_coefficients: [0.11, 0.15, 0.19, 0.23, 0.29],
    base_amounts: [0.0, 110.0, 410.0, 1_740.0, 6_340.0],
};

impl BucketSchedule {
    /// Bucket index (1-based) for a business indicator.
    pub fn bucket(&self, bi: f64) -> u8 {
        match self.breakpoints.iter().position(|&b| bi <= b) {
            Some(i) => (i + 1) as u8,
            None => 5,
        }
    }

    /// BIC for a business indicator, with its bucket.
    ///
    /// Interior buckets interpolate between the exact base amounts so the
    /// schedule evaluates exactly to {110, 410, 1740, 6340} at the
    /// breakpoints; this is algebraically the marginal form
    /// `base + coefficient · (bi − lower)`.
    pub fn bic(&self, bi: f64) -> Result<(f64, u8), SmaError> {
        if !(bi >= 0.0) {
            return Err(SmaError::NegativeBi(bi));
        }
        let bucket = self.bucket(bi);
        let i = (bucket - 1) as usize;
        let lower = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
        let value = if i < 4 {
            let upper = self.breakpoints[i];
            let base_lo = self.base_amounts[i];
            let base_hi = self.base_amounts[i + 1];
            base_lo + (base_hi - base_lo) * (bi - lower) / (upper - lower)
        } else {
            self.base_amounts[4] + self.marginal_coefficients[4] * (bi - lower)
        };
        Ok((value, bucket))
    }
}

/// BIC and bucket for a business indicator under the regulatory schedule.
pub fn bic(bi: f64) -> Result<(f64, u8), SmaError> {
    SCHEDULE.bic(bi)
}

/// Inputs to an SMA capital computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmaInputs {
    /// Business indicator in millions.
    pub bi: f64,
    /// Annual loss records covering the averaging window (10 years
    /// canonical, at least 5 accepted).
    pub loss_history: Vec<AnnualLossRecord>,
    /// Lower event threshold in base UM.
    pub threshold_l: f64,
    /// Upper event threshold in base UM.
    pub threshold_h: f64,
    /// Accept histories outside the 5–10 year window.
    #[serde(default)]
    pub allow_any_history_length: bool,
}

impl SmaInputs {
    pub fn new(bi: f64, loss_history: Vec<AnnualLossRecord>) -> Self {
        Self {
            bi,
            loss_history,
            threshold_l: DEFAULT_THRESHOLD_L,
            threshold_h: DEFAULT_THRESHOLD_H,
            allow_any_history_length: false,
        }
    }

    pub fn validate(&self) -> Result<(), SmaError> {
        if !(self.bi >= 0.0) {
            return Err(SmaError::NegativeBi(self.bi));
        }
        if !(self.threshold_l >= 0.0 && self.threshold_l < self.threshold_h) {
            return Err(SmaError::BadThresholds {
                l: self.threshold_l,
                h: self.threshold_h,
            });
        }
        if self.loss_history.is_empty() {
            return Err(SmaError::EmptyHistory);
        }
        let years = self.loss_history.len();
        if !self.allow_any_history_length && !(5..=10).contains(&years) {
            return Err(SmaError::HistoryLength { years });
        }
        if self
            .loss_history
            .iter()
            .any(|r| r.events.iter().any(|&x| x < 0.0))
        {
            return Err(SmaError::NegativeEvent);
        }
        Ok(())
    }

    /// Full pipeline: loss component from the history, then the capital
    /// charge.
    pub fn capital(&self) -> Result<CapitalResult, SmaError> {
        self.validate()?;
        let lc = loss_component(&self.loss_history, self.threshold_l, self.threshold_h)?;
        k_sma(self.bi, lc)
    }
}

/// One SMA capital figure with its decomposition, all in millions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapitalResult {
    pub k_sma: f64,
    pub bucket: u8,
    pub bic: f64,
    pub lc: f64,
}

/// Loss component of a loss history, in millions.
///
/// `LC = 7·avg(annual total) + 7·avg(annual total over events > L)
///     + 5·avg(annual total over events > H)`, strict inequality at both
/// thresholds. Event amounts are base UM.
pub fn loss_component(
    history: &[AnnualLossRecord],
    threshold_l: f64,
    threshold_h: f64,
) -> Result<f64, SmaError> {
    if history.is_empty() {
        return Err(SmaError::EmptyHistory);
    }
    if !(threshold_l >= 0.0 && threshold_l < threshold_h) {
        return Err(SmaError::BadThresholds {
            l: threshold_l,
            h: threshold_h,
        });
    }
    let years = history.len() as f64;
    let mut sum_total = 0.0;
    let mut sum_above_l = 0.0;
    let mut sum_above_h = 0.0;
    for record in history {
        sum_total += record.total;
        for &x in &record.events {
            if x < 0.0 {
                return Err(SmaError::NegativeEvent);
            }
            if x > threshold_l {
                sum_above_l += x;
            }
            if x > threshold_h {
                sum_above_h += x;
            }
        }
    }
    let lc_um = (7.0 * sum_total + 7.0 * sum_above_l + 5.0 * sum_above_h) / years;
    Ok(lc_um / UM_PER_MILLION)
}

/// SMA capital charge for a business indicator and loss component, both in
/// millions.
pub fn k_sma(bi: f64, lc: f64) -> Result<CapitalResult, SmaError> {
    if !(lc >= 0.0) {
        return Err(SmaError::NegativeLc(lc));
    }
    let (bic, bucket) = bic(bi)?;
    if bic == 0.0 && lc > 0.0 {
        return Err(SmaError::ZeroBicWithLosses { lc });
    }
    let k = if bucket == 1 {
        bic
    } else {
        110.0 + (bic - 110.0) * (std::f64::consts::E - 1.0 + lc / bic).ln()
    };
    Ok(CapitalResult {
        k_sma: k,
        bucket,
        bic,
        lc,
    })
}

/// Long-run expected loss component of a Poisson–severity cell, in
/// millions: `λ·(7·E[X] + 7·E[X·1{X>L}] + 5·E[X·1{X>H}])`.
pub fn long_run_lc_generic(
    freq: &FrequencySpec,
    sev: &SeveritySpec,
    threshold_l: f64,
    threshold_h: f64,
) -> Result<f64, SmaError> {
    let lambda = freq.lambda();
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mean = sev.mean();
    if !mean.is_finite() {
        return Err(SmaError::InfiniteMean);
    }
    let above_l = sev.partial_expectation(threshold_l);
    let above_h = sev.partial_expectation(threshold_h);
    Ok(lambda * (7.0 * mean + 7.0 * above_l + 5.0 * above_h) / UM_PER_MILLION)
}

/// Closed form of [`long_run_lc_generic`] for Lognormal severity:
/// `λ·e^{μ+σ²/2}·(7 + 7·Φ((σ²+μ−ln L)/σ) + 5·Φ((σ²+μ−ln H)/σ))`, in
/// millions.
pub fn long_run_lc_lognormal(
    lambda: f64,
    mu: f64,
    sigma: f64,
    threshold_l: f64,
    threshold_h: f64,
) -> f64 {
    let s2 = sigma * sigma;
    let mean = (mu + 0.5 * s2).exp();
    let z_l = (s2 + mu - threshold_l.ln()) / sigma;
    let z_h = (s2 + mu - threshold_h.ln()) / sigma;
    lambda * mean * (7.0 + 7.0 * norm_cdf(z_l) + 5.0 * norm_cdf(z_h)) / UM_PER_MILLION
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // steepest marginal bounds every increment of the schedule
        #[test]
        fn bic_is_lipschitz_continuous(x in 0.0_f64..120_000.0, eps in 1e-6_f64..5_000.0) {
            let a = bic(x).unwrap().0;
            let b = bic(x + eps).unwrap().0;
            prop_assert!(b >= a - 1e-9);
            prop_assert!((b - a) <= 0.29 * eps * (1.0 + 1e-12) + 1e-9);
        }

        #[test]
        fn k_sma_nondecreasing_in_lc(bi in 1_000.1_f64..100_000.0, lc in 0.0_f64..50_000.0, step in 0.1_f64..5_000.0) {
            let k1 = k_sma(bi, lc).unwrap().k_sma;
            let k2 = k_sma(bi, lc + step).unwrap().k_sma;
            prop_assert!(k2 >= k1 - 1e-12 * k1.abs());
        }
    }
}
