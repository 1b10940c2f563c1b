//! Error counting and interval estimation for Monte Carlo runs.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no trials observed")]
    Empty,
    #[error("errors ({errors}) exceed trials ({trials})")]
    Inconsistent { errors: u64, trials: u64 },
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && errors <= trials);
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // At the corners the analytic bound is exact; don't let rounding in the
    // square root leave a residue.
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// A measured error ratio with its 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub errors: u64,
    pub trials: u64,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RateEstimate {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    /// True when this estimate's interval lies entirely below the other's.
    pub fn separated_below(&self, other: &RateEstimate) -> bool {
        self.hi < other.lo
    }
}

/// Block (or bit) error ratio with a Wilson 95% interval.
pub fn error_rate(errors: u64, trials: u64) -> Result<RateEstimate, MetricsError> {
    if trials == 0 {
        return Err(MetricsError::Empty);
    }
    if errors > trials {
        return Err(MetricsError::Inconsistent { errors, trials });
    }
    let (lo, hi) = wilson_interval(errors, trials, Z95);
    Ok(RateEstimate { errors, trials, rate: errors as f64 / trials as f64, lo, hi })
}

/// Running error counter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub errors: u64,
    pub trials: u64,
}

impl Tally {
    pub fn record(&mut self, error: bool) {
        self.trials += 1;
        self.errors += u64::from(error);
    }

    pub fn record_many(&mut self, errors: u64, trials: u64) {
        self.errors += errors;
        self.trials += trials;
    }

    pub fn merge(&mut self, other: &Tally) {
        self.errors += other.errors;
        self.trials += other.trials;
    }

    pub fn estimate(&self) -> Result<RateEstimate, MetricsError> {
        error_rate(self.errors, self.trials)
    }
}
