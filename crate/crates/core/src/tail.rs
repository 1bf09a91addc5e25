//! Closed-form tail predictions: γ-quantile degree thresholds and
//! high-degree cardinalities under the power-law and PLN models.

use serde::Serialize;

use crate::dist::ModelSpec;
use crate::error::{Error, Result};
use crate::fit::FitReport;
use crate::sample::DegreeSample;
use crate::special::erfc_series_factor;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("gamma", gamma, "must lie in (0, 1)"))
    }
}

/// (1/γ)^(1/α), with `alpha` the exponent of the tail P(X > x) = x^(−α).
pub fn xi_powerlaw(alpha: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha", alpha, "tail exponent must be positive"));
    }
    check_gamma(gamma)?;
    Ok((1.0 / gamma).powf(1.0 / alpha))
}

/// The PLN γ-quantile bound e^(μ + √(−2τ² ln(√(2π)γ/τ))).
pub fn xi_pln(mu: f64, tau: f64, gamma: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", tau, "must be positive"));
    }
    check_gamma(gamma)?;
    let r = SQRT_2PI * gamma / tau;
    if r > 1.0 + 1e-12 {
        return Err(Error::domain(format!(
            "quantile bound needs sqrt(2*pi)*gamma/tau <= 1, got {r} (gamma = {gamma}, tau = {tau})"
        )));
    }
    Ok((mu + (-2.0 * tau * tau * r.ln()).max(0.0).sqrt()).exp())
}

/// (1/(eγ))^ν, the predicted power-law/PLN quantile ratio. Stated for
/// γ ∈ [0.01, 0.1]; other values are computed with a warning.
pub fn ratio_theorem1(nu: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.01..=0.1).contains(&gamma) {
        log::warn!("ratio_theorem1: gamma = {gamma} outside [0.01, 0.1]");
    }
    Ok((1.0 / (std::f64::consts::E * gamma)).powf(nu))
}

/// N·(d0/ξ)^(α−1), the exact upper-tail count of a power law with pdf
/// exponent α.
pub fn count_high_degree_powerlaw(n: u64, alpha: f64, d0: f64, xi: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::invalid("alpha", alpha, "pdf exponent must exceed 1"));
    }
    if !(d0 > 0.0) || !(xi >= d0) {
        return Err(Error::domain(format!("need xi >= d0 > 0, got xi = {xi}, d0 = {d0}")));
    }
    Ok(n as f64 * (d0 / xi).powf(alpha - 1.0))
}

/// N/(2π) · e^(−w²)/w with w = (ln ξ − μ)/√(2τ²), rounded to a count.
pub fn count_high_degree_pln(n: u64, mu: f64, tau: f64, xi: f64) -> Result<f64> {
    count_high_degree_pln_terms(n, mu, tau, xi, 1)
}

/// [`count_high_degree_pln`] with `n_terms` terms of the erfc expansion.
pub fn count_high_degree_pln_terms(n: u64, mu: f64, tau: f64, xi: f64, n_terms: usize) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", tau, "must be positive"));
    }
    if n_terms == 0 {
        return Err(Error::invalid("n_terms", 0.0, "at least one series term is required"));
    }
    if !(xi > 0.0) || !(xi.ln() > mu) {
        return Err(Error::domain(format!(
            "cardinality formula holds on the upper tail only: need ln(xi) > mu, got ln(xi) = {}, mu = {mu}",
            xi.ln()
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let w = (xi.ln() - mu) / (2.0 * tau * tau).sqrt();
    let raw = n as f64 / (2.0 * std::f64::consts::PI) * (-w * w).exp() / w * erfc_series_factor(w, n_terms);
    Ok(raw.round())
}

/// The ⌈(1−γ)n⌉-th order statistic.
pub fn xi_empirical(sample: &DegreeSample, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let k = ((1.0 - gamma) * sample.n() as f64 - 1e-9).ceil() as usize;
    Ok(sample.order_statistic(k))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub gamma: f64,
    pub xi_powerlaw: f64,
    /// `None` where the closed form is undefined (√(2π)γ > τ).
    pub xi_pln: Option<f64>,
    pub xi_empirical: f64,
    /// Model counts at each model's own threshold.
    pub count_powerlaw: f64,
    pub count_pln: Option<f64>,
    pub count_empirical: u64,
    /// Model counts at the empirical threshold.
    pub count_powerlaw_at_empirical: f64,
    pub count_pln_at_empirical: Option<f64>,
    pub ratio_theorem1: f64,
    /// Ratio of the two model thresholds, to compare with `ratio_theorem1`.
    pub ratio_direct: Option<f64>,
    pub nu: f64,
    /// |μ_fit − ν|, the applicability gap of the ratio approximation.
    pub mu_nu_gap: f64,
}

pub fn tail_report(sample: &DegreeSample, pl_fit: &FitReport, pln_fit: &FitReport, gamma: f64) -> Result<TailReport> {
    tail_report_terms(sample, pl_fit, pln_fit, gamma, 1)
}

pub fn tail_report_terms(
    sample: &DegreeSample,
    pl_fit: &FitReport,
    pln_fit: &FitReport,
    gamma: f64,
    n_terms: usize,
) -> Result<TailReport> {
    check_gamma(gamma)?;
    let ModelSpec::PowerLaw { alpha, d0 } = pl_fit.model else {
        return Err(Error::domain(format!("expected a power-law fit, got {}", pl_fit.kind())));
    };
    let ModelSpec::Pln { mu, tau, .. } = pln_fit.model else {
        return Err(Error::domain(format!("expected a PLN fit, got {}", pln_fit.kind())));
    };
    let n = sample.n() as u64;
    let xi_pl = d0 * xi_powerlaw(alpha - 1.0, gamma)?;
    let xi_pn = match xi_pln(mu, tau, gamma) {
        Ok(v) => Some(v),
        Err(Error::Domain(msg)) => {
            log::warn!("PLN threshold undefined: {msg}");
            None
        }
        Err(e) => return Err(e),
    };
    let xi_emp = xi_empirical(sample, gamma)?;
    let nu = sample.log_mean();
    let pln_count = |xi: f64| count_high_degree_pln_terms(n, mu, tau, xi, n_terms);
    Ok(TailReport {
        gamma,
        xi_powerlaw: xi_pl,
        xi_pln: xi_pn,
        xi_empirical: xi_emp,
        count_powerlaw: count_high_degree_powerlaw(n, alpha, d0, xi_pl)?,
        count_pln: xi_pn.map(pln_count).transpose()?,
        count_empirical: sample.count_at_least(xi_emp) as u64,
        count_powerlaw_at_empirical: count_high_degree_powerlaw(n, alpha, d0, xi_emp.max(d0))?,
        count_pln_at_empirical: pln_count(xi_emp).ok(),
        ratio_theorem1: ratio_theorem1(nu, gamma)?,
        ratio_direct: xi_pn.map(|x| xi_pl / x),
        nu,
        mu_nu_gap: (mu - nu).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::std_normal_ccdf;
    use approx::assert_relative_eq;

    #[test]
    fn powerlaw_threshold_examples() {
        assert_relative_eq!(xi_powerlaw(2.0, 0.01).unwrap(), 10.0, max_relative = 1e-14);
        assert_relative_eq!(xi_powerlaw(1.0, 0.1).unwrap(), 10.0, max_relative = 1e-14);
        assert_relative_eq!(xi_powerlaw(0.5, 0.1).unwrap(), 100.0, max_relative = 1e-13);
        assert_relative_eq!(xi_powerlaw(3.0, 0.5).unwrap(), 2f64.powf(1.0 / 3.0), max_relative = 1e-14);
        assert!(xi_powerlaw(2.0, 1.5).is_err());
    }

    #[test]
    fn pln_threshold_examples() {
        assert_relative_eq!(xi_pln(5.0, 1.0, 0.1).unwrap(), 783.4, max_relative = 1e-3);
        assert_relative_eq!(xi_pln(5.0, 1.0, 0.1).unwrap(), 783.301_982_661_3, max_relative = 1e-12);
        assert_relative_eq!(xi_pln(0.0, 1.0, 0.1).unwrap(), 1.6636f64.exp(), max_relative = 1e-4);
        let boundary = 1.0 / SQRT_2PI;
        assert_relative_eq!(xi_pln(3.0, 1.0, boundary).unwrap(), 3f64.exp(), max_relative = 1e-12);
        assert!(matches!(xi_pln(0.0, 0.1, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn predicted_ratio_examples() {
        assert_relative_eq!(ratio_theorem1(2.0, 0.1).unwrap(), 13.53, max_relative = 1e-3);
        assert_eq!(ratio_theorem1(0.0, 0.05).unwrap(), 1.0);
        assert_relative_eq!(ratio_theorem1(1.0, (-1f64).exp()).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn powerlaw_count_examples() {
        assert_relative_eq!(count_high_degree_powerlaw(1000, 2.0, 1.0, 10.0).unwrap(), 100.0, max_relative = 1e-13);
        assert_relative_eq!(count_high_degree_powerlaw(10_000, 3.0, 1.0, 10.0).unwrap(), 100.0, max_relative = 1e-13);
        assert_eq!(count_high_degree_powerlaw(500, 2.5, 3.0, 3.0).unwrap(), 500.0);
        assert!(count_high_degree_powerlaw(500, 2.5, 3.0, 2.0).is_err());
    }

    #[test]
    fn pln_count_examples() {
        let c = count_high_degree_pln(100_000, 5.0, 1.0, 6f64.exp()).unwrap();
        assert_eq!(c, 13652.0);
        let exact = 1e5 * std_normal_ccdf(1.0);
        assert!((c - exact).abs() / exact < 0.2);
        assert_eq!(count_high_degree_pln(0, 5.0, 1.0, 6f64.exp()).unwrap(), 0.0);
        assert!(matches!(count_high_degree_pln(10, 5.0, 1.0, 5f64.exp()), Err(Error::Domain(_))));
    }

    #[test]
    fn pln_count_deep_tail_uses_the_literal_constant() {
        // w = 4/√2; the N/(2π) constant sits a factor 1/√π below N·Φᶜ(4).
        let w = 4.0 / 2f64.sqrt();
        let c = count_high_degree_pln(100_000, 5.0, 1.0, 9f64.exp()).unwrap();
        assert_eq!(c, (1e5 / (2.0 * std::f64::consts::PI) * (-w * w).exp() / w).round());
        assert_eq!(c, 2.0);
    }

    #[test]
    fn empirical_threshold_includes_ties() {
        let s = DegreeSample::from_degrees(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).unwrap();
        assert_eq!(xi_empirical(&s, 0.1).unwrap(), 9.0);
        assert_eq!(xi_empirical(&s, 0.3).unwrap(), 7.0);
        assert_eq!(xi_empirical(&s, 1.0 - 1e-6).unwrap(), 1.0);
        let s = DegreeSample::from_degrees(&[3, 3, 3, 3]).unwrap();
        assert_eq!(xi_empirical(&s, 0.25).unwrap(), 3.0);
        assert_eq!(s.count_at_least(3.0), 4);
    }
}
