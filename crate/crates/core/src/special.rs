//! Standard normal and error-function helpers.
//!
//! `erf`/`erfc` are backed by `libm` (relative accuracy near machine
//! precision). Everything that ends up inside a logarithm goes through the
//! log-space variants so that far-tail arguments neither underflow nor lose
//! digits to cancellation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Beyond this argument `erfc(t / sqrt 2)` is replaced by its asymptotic
/// series; the series is accurate to ~1e-15 relative there.
const LOG_TAIL_SWITCH: f64 = 30.0;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Φ(x), the standard normal cumulative distribution.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Φᶜ(x) = 1 − Φ(x), computed without cancellation.
pub fn std_normal_ccdf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// ln Φᶜ(x), finite for every finite `x`.
pub fn ln_std_normal_ccdf(x: f64) -> f64 {
    if x < -LOG_TAIL_SWITCH {
        // Φᶜ(x) = 1 − Φᶜ(−x) with Φᶜ(−x) below 1e-190.
        return (-std_normal_ccdf(-x)).ln_1p();
    }
    if x <= LOG_TAIL_SWITCH {
        return std_normal_ccdf(x).ln();
    }
    ln_ccdf_series(x)
}

/// Mills-ratio series: Φᶜ(x) = φ(x)/x · (1 − 1/x² + 3/x⁴ − 15/x⁶ + …)
fn ln_ccdf_series(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..8 {
        term *= -((2 * k - 1) as f64) * inv2;
        sum += term;
    }
    -0.5 * x * x - LN_SQRT_2PI - x.ln() + sum.ln()
}

/// ln Φ(x).
pub fn ln_std_normal_cdf(x: f64) -> f64 {
    ln_std_normal_ccdf(-x)
}

/// Partial sum of the large-argument expansion
///
/// ```text
/// erfc(x) ≈ e^(−x²) / (x √π) · Σ_{n=0}^{N−1} (−1)^n (2n)! / (n! (2x)^(2n))
/// ```
///
/// With `n_terms == 1` this is exactly `e^(−x²) / (x √π)`. The series is
/// divergent, so adding terms only helps while they keep shrinking.
pub fn erfc_asymptotic(x: f64, n_terms: usize) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "asymptotic erfc expansion needs a positive finite argument, got {x}"
        )));
    }
    if n_terms == 0 {
        return Err(Error::invalid("n_terms", 0.0, "at least one series term is required"));
    }
    let lead = (-x * x).exp() / (x * PI.sqrt());
    Ok(lead * erfc_series_factor(x, n_terms))
}

/// The bracketed series of [`erfc_asymptotic`] on its own (1 for one term).
pub fn erfc_series_factor(x: f64, n_terms: usize) -> f64 {
    let ratio = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..n_terms {
        // t_n / t_{n−1} = −(2n − 1) / (2x²)
        term *= -((2 * n - 1) as f64) * ratio;
        sum += term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn phi_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_relative_eq!(std_normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-14);
        assert_relative_eq!(std_normal_cdf(-1.0), 1.0 - std_normal_cdf(1.0), epsilon = 1e-15);
    }

    #[test]
    fn phi_and_complement_sum_to_one() {
        for i in -400..=400 {
            let x = i as f64 * 0.02;
            assert!((std_normal_cdf(x) + std_normal_ccdf(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn log_ccdf_is_continuous_across_the_series_switch() {
        for x in [20.0, 25.0, LOG_TAIL_SWITCH, 35.0] {
            assert_relative_eq!(ln_ccdf_series(x), std_normal_ccdf(x).ln(), max_relative = 1e-13);
        }
        let below = ln_std_normal_ccdf(-LOG_TAIL_SWITCH - 1e-9);
        let above = ln_std_normal_ccdf(-LOG_TAIL_SWITCH + 1e-9);
        assert!((below - above).abs() < 1e-15);
        // far tail stays finite
        assert!(ln_std_normal_ccdf(1e3).is_finite());
        assert!(ln_std_normal_cdf(-1e3).is_finite());
    }

    #[test]
    fn asymptotic_first_term_and_second_term() {
        let one = erfc_asymptotic(3.0, 1).unwrap();
        assert_relative_eq!(one, (-9.0f64).exp() / (3.0 * PI.sqrt()), max_relative = 1e-15);
        assert_relative_eq!(one, 2.3208e-5, max_relative = 1e-4);
        let two = erfc_asymptotic(3.0, 2).unwrap();
        assert_relative_eq!(two, one * (1.0 - 1.0 / 18.0), max_relative = 1e-15);
    }

    #[test]
    fn asymptotic_rejects_nonpositive() {
        assert!(erfc_asymptotic(0.0, 1).is_err());
        assert!(erfc_asymptotic(-2.0, 1).is_err());
        assert!(erfc_asymptotic(1.0, 0).is_err());
    }
}
