use serde::Serialize;

use crate::error::{Error, Result};

/// A multiset of observed degrees with the summary statistics the fitters
/// and tail analysis share. Values are positive reals; integer degree data is
/// the common case but continuous draws are accepted unchanged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSample {
    sorted: Vec<f64>,
    unique: Vec<(f64, u64)>,
    d0: f64,
    d_max: f64,
    log_mean: f64,
    log_var: f64,
    sum_log: f64,
}

impl DegreeSample {
    pub fn from_degrees(degrees: &[u64]) -> Result<Self> {
        if degrees.contains(&0) {
            return Err(Error::domain("degree sample contains a zero degree"));
        }
        let values: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
        Self::from_values(&values)
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() < 2 {
            return Err(Error::DegenerateSample(format!(
                "need at least two observations, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!("degree values must be positive and finite, got {bad}")));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);

        let mut unique: Vec<(f64, u64)> = Vec::new();
        for &v in &sorted {
            match unique.last_mut() {
                Some((last, c)) if *last == v => *c += 1,
                _ => unique.push((v, 1)),
            }
        }

        let n = sorted.len() as f64;
        let mut sum_log = 0.0;
        let mut comp = 0.0;
        for &(v, c) in &unique {
            // Neumaier summation keeps the log-mean stable at 10^7 points.
            let term = c as f64 * v.ln();
            let t = sum_log + term;
            if sum_log.abs() >= term.abs() {
                comp += (sum_log - t) + term;
            } else {
                comp += (term - t) + sum_log;
            }
            sum_log = t;
        }
        sum_log += comp;
        let log_mean = sum_log / n;
        let log_var = unique
            .iter()
            .map(|&(v, c)| c as f64 * (v.ln() - log_mean).powi(2))
            .sum::<f64>()
            / n;

        Ok(DegreeSample {
            d0: sorted[0],
            d_max: sorted[sorted.len() - 1],
            sorted,
            unique,
            log_mean,
            log_var,
            sum_log,
        })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// Minimum observed degree.
    pub fn d0(&self) -> f64 {
        self.d0
    }

    /// Maximum observed degree.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Mean of ln(degree).
    pub fn log_mean(&self) -> f64 {
        self.log_mean
    }

    /// Population variance of ln(degree).
    pub fn log_var(&self) -> f64 {
        self.log_var
    }

    pub fn sum_log(&self) -> f64 {
        self.sum_log
    }

    pub fn mean(&self) -> f64 {
        self.unique.iter().map(|&(v, c)| v * c as f64).sum::<f64>() / self.n() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Distinct values in increasing order with their multiplicities.
    pub fn unique(&self) -> &[(f64, u64)] {
        &self.unique
    }

    /// (value, count / n) over the distinct values.
    pub fn empirical_pmf(&self) -> Vec<(f64, f64)> {
        let n = self.n() as f64;
        self.unique.iter().map(|&(v, c)| (v, c as f64 / n)).collect()
    }

    /// (value, fraction of observations ≥ value) over the distinct values.
    pub fn empirical_ccdf(&self) -> Vec<(f64, f64)> {
        let n = self.n() as f64;
        let mut remaining = self.n() as u64;
        self.unique
            .iter()
            .map(|&(v, c)| {
                let p = remaining as f64 / n;
                remaining -= c;
                (v, p)
            })
            .collect()
    }

    /// The k-th order statistic, 1-based and clamped to `1..=n`.
    pub fn order_statistic(&self, k: usize) -> f64 {
        self.sorted[k.clamp(1, self.n()) - 1]
    }

    /// Number of observations ≥ `threshold`.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.n() - self.sorted.partition_point(|&v| v < threshold)
    }
}
