//! The seven degree-distribution families.
//!
//! Degrees are treated as continuous positive reals. The DPLN family and its
//! two limit forms share the log-space building blocks
//!
//! ```text
//! T_up(x)  = x^(−α) · exp(αμ + α²τ²/2) · Φ(z − ατ)
//! T_low(x) = x^β    · exp(−βμ + β²τ²/2) · Φᶜ(z + βτ),   z = (ln x − μ)/τ
//! ```
//!
//! with `pdf = αβ/(α+β) · (T_up + T_low) / x`, PLN as the α → ∞ limit
//! (`β·T_low/x`) and LNP as the β → ∞ limit (`α·T_up/x`).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::ln_integral_exp;
use crate::sample::DegreeSample;
use crate::special::{
    ln_std_normal_ccdf, ln_std_normal_cdf, std_normal_ccdf, std_normal_cdf,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    PowerLaw,
    Lognormal,
    Exponential,
    ParetoExpCutoff,
    Lnp,
    Pln,
    Dpln,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::PowerLaw,
        ModelKind::Lognormal,
        ModelKind::Exponential,
        ModelKind::ParetoExpCutoff,
        ModelKind::Lnp,
        ModelKind::Pln,
        ModelKind::Dpln,
    ];

    /// Parameters estimated by fitting; data-anchored locations (`d0`, the
    /// exponential shift) are not counted.
    pub fn free_param_count(self) -> usize {
        match self {
            ModelKind::PowerLaw => 1,
            ModelKind::Lognormal => 2,
            ModelKind::Exponential => 1,
            ModelKind::ParetoExpCutoff => 2,
            ModelKind::Lnp | ModelKind::Pln => 3,
            ModelKind::Dpln => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PowerLaw => "powerlaw",
            ModelKind::Lognormal => "lognormal",
            ModelKind::Exponential => "exponential",
            ModelKind::ParetoExpCutoff => "pareto_exp_cutoff",
            ModelKind::Lnp => "lnp",
            ModelKind::Pln => "pln",
            ModelKind::Dpln => "dpln",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        ModelKind::ALL.into_iter().find(|k| {
            k.name() == s
                || matches!(
                    (k, s.as_str()),
                    (ModelKind::PowerLaw, "power_law" | "pl")
                        | (ModelKind::Exponential, "exp")
                        | (ModelKind::ParetoExpCutoff, "pec" | "cutoff")
                )
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Density `(α−1)/d0 · (x/d0)^(−α)` on `[d0, ∞)`.
    PowerLaw { alpha: f64, d0: f64 },
    Lognormal { mu: f64, sigma: f64 },
    /// Density `λ e^(−λ(x − loc))` on `[loc, ∞)`; fits anchor `loc` at the
    /// sample minimum.
    Exponential { lambda: f64, loc: f64 },
    /// Density `x^(−α) e^(−λx) / Z` on `[d0, ∞)`.
    ParetoExpCutoff { alpha: f64, lambda: f64, d0: f64 },
    Lnp { alpha: f64, mu: f64, tau: f64 },
    Pln { beta: f64, mu: f64, tau: f64 },
    Dpln { alpha: f64, beta: f64, mu: f64, tau: f64 },
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "must be positive and finite"))
    }
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "must be finite"))
    }
}

impl ModelSpec {
    pub fn power_law(alpha: f64, d0: f64) -> Result<Self> {
        ModelSpec::PowerLaw { alpha, d0 }.validated()
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        ModelSpec::Lognormal { mu, sigma }.validated()
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        ModelSpec::Exponential { lambda, loc: 0.0 }.validated()
    }

    pub fn pareto_exp_cutoff(alpha: f64, lambda: f64, d0: f64) -> Result<Self> {
        ModelSpec::ParetoExpCutoff { alpha, lambda, d0 }.validated()
    }

    pub fn lnp(alpha: f64, mu: f64, tau: f64) -> Result<Self> {
        ModelSpec::Lnp { alpha, mu, tau }.validated()
    }

    pub fn pln(beta: f64, mu: f64, tau: f64) -> Result<Self> {
        ModelSpec::Pln { beta, mu, tau }.validated()
    }

    pub fn dpln(alpha: f64, beta: f64, mu: f64, tau: f64) -> Result<Self> {
        ModelSpec::Dpln {
            alpha,
            beta,
            mu,
            tau,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::PowerLaw { alpha, d0 } => {
                check_positive("d0", d0)?;
                if !(alpha > 1.0 && alpha.is_finite()) {
                    return Err(Error::invalid("alpha", alpha, "power-law exponent must exceed 1"));
                }
            }
            ModelSpec::Lognormal { mu, sigma } => {
                check_finite("mu", mu)?;
                check_positive("sigma", sigma)?;
            }
            ModelSpec::Exponential { lambda, loc } => {
                check_positive("lambda", lambda)?;
                if !(loc >= 0.0 && loc.is_finite()) {
                    return Err(Error::invalid("loc", loc, "must be non-negative"));
                }
            }
            ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } => {
                check_positive("alpha", alpha)?;
                check_positive("lambda", lambda)?;
                check_positive("d0", d0)?;
            }
            ModelSpec::Lnp { alpha, mu, tau } => {
                check_positive("alpha", alpha)?;
                check_finite("mu", mu)?;
                check_positive("tau", tau)?;
            }
            ModelSpec::Pln { beta, mu, tau } => {
                check_positive("beta", beta)?;
                check_finite("mu", mu)?;
                check_positive("tau", tau)?;
            }
            ModelSpec::Dpln {
                alpha,
                beta,
                mu,
                tau,
            } => {
                check_positive("alpha", alpha)?;
                check_positive("beta", beta)?;
                check_finite("mu", mu)?;
                check_positive("tau", tau)?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::PowerLaw { .. } => ModelKind::PowerLaw,
            ModelSpec::Lognormal { .. } => ModelKind::Lognormal,
            ModelSpec::Exponential { .. } => ModelKind::Exponential,
            ModelSpec::ParetoExpCutoff { .. } => ModelKind::ParetoExpCutoff,
            ModelSpec::Lnp { .. } => ModelKind::Lnp,
            ModelSpec::Pln { .. } => ModelKind::Pln,
            ModelSpec::Dpln { .. } => ModelKind::Dpln,
        }
    }

    /// Named parameters in a fixed order, for flat serialization.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ModelSpec::PowerLaw { alpha, d0 } => vec![("alpha", alpha), ("d0", d0)],
            ModelSpec::Lognormal { mu, sigma } => vec![("mu", mu), ("sigma", sigma)],
            ModelSpec::Exponential { lambda, loc } => vec![("lambda", lambda), ("loc", loc)],
            ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } => {
                vec![("alpha", alpha), ("lambda", lambda), ("d0", d0)]
            }
            ModelSpec::Lnp { alpha, mu, tau } => vec![("alpha", alpha), ("mu", mu), ("tau", tau)],
            ModelSpec::Pln { beta, mu, tau } => vec![("beta", beta), ("mu", mu), ("tau", tau)],
            ModelSpec::Dpln {
                alpha,
                beta,
                mu,
                tau,
            } => vec![("alpha", alpha), ("beta", beta), ("mu", mu), ("tau", tau)],
        }
    }

    /// Inverse of [`ModelSpec::params`].
    pub fn from_params(kind: ModelKind, params: &[(&str, f64)]) -> Result<Self> {
        let get = |name: &'static str| -> Result<f64> {
            params
                .iter()
                .find(|(n, _)| *n == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| Error::domain(format!("missing parameter `{name}` for {kind}")))
        };
        let spec = match kind {
            ModelKind::PowerLaw => ModelSpec::PowerLaw {
                alpha: get("alpha")?,
                d0: get("d0").unwrap_or(1.0),
            },
            ModelKind::Lognormal => ModelSpec::Lognormal {
                mu: get("mu")?,
                sigma: get("sigma")?,
            },
            ModelKind::Exponential => ModelSpec::Exponential {
                lambda: get("lambda")?,
                loc: get("loc").unwrap_or(0.0),
            },
            ModelKind::ParetoExpCutoff => ModelSpec::ParetoExpCutoff {
                alpha: get("alpha")?,
                lambda: get("lambda")?,
                d0: get("d0").unwrap_or(1.0),
            },
            ModelKind::Lnp => ModelSpec::Lnp {
                alpha: get("alpha")?,
                mu: get("mu")?,
                tau: get("tau")?,
            },
            ModelKind::Pln => ModelSpec::Pln {
                beta: get("beta")?,
                mu: get("mu")?,
                tau: get("tau")?,
            },
            ModelKind::Dpln => ModelSpec::Dpln {
                alpha: get("alpha")?,
                beta: get("beta")?,
                mu: get("mu")?,
                tau: get("tau")?,
            },
        };
        spec.validated()
    }

    /// Infimum of the support: `d0` (or the exponential shift) for the
    /// anchored families, 0 otherwise.
    pub fn support_min(&self) -> f64 {
        match *self {
            ModelSpec::PowerLaw { d0, .. } | ModelSpec::ParetoExpCutoff { d0, .. } => d0,
            ModelSpec::Exponential { loc, .. } => loc,
            _ => 0.0,
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(x > 0.0) || x.is_nan() {
            return Err(Error::domain(format!("degree must be positive, got {x}")));
        }
        match *self {
            ModelSpec::PowerLaw { d0, .. } | ModelSpec::ParetoExpCutoff { d0, .. } if x < d0 => {
                Err(Error::domain(format!("degree {x} lies below the support start d0 = {d0}")))
            }
            _ => Ok(()),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.ln_pdf(x)?.exp())
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.ln_pdf_unchecked(x))
    }

    /// ln f(x) without argument validation; −∞ outside the support.
    pub fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        let lx = x.ln();
        match *self {
            ModelSpec::PowerLaw { alpha, d0 } => {
                if x < d0 {
                    return f64::NEG_INFINITY;
                }
                (alpha - 1.0).ln() - d0.ln() - alpha * (lx - d0.ln())
            }
            ModelSpec::Lognormal { mu, sigma } => {
                let z = (lx - mu) / sigma;
                -0.5 * z * z - lx - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
            ModelSpec::Exponential { lambda, loc } => {
                if x < loc {
                    return f64::NEG_INFINITY;
                }
                lambda.ln() - lambda * (x - loc)
            }
            ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } => {
                if x < d0 {
                    return f64::NEG_INFINITY;
                }
                -alpha * lx - lambda * x - pec_ln_tail(alpha, lambda, d0)
            }
            ModelSpec::Pln { beta, mu, tau } => beta.ln() + ln_t_low(beta, mu, tau, lx) - lx,
            ModelSpec::Lnp { alpha, mu, tau } => alpha.ln() + ln_t_up(alpha, mu, tau, lx) - lx,
            ModelSpec::Dpln {
                alpha,
                beta,
                mu,
                tau,
            } => {
                let a = ln_t_up(alpha, mu, tau, lx);
                let b = ln_t_low(beta, mu, tau, lx);
                let hi = a.max(b);
                let lse = hi + ((a - hi).exp() + (b - hi).exp()).ln();
                (alpha * beta / (alpha + beta)).ln() + lse - lx
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_nan() {
            return Err(Error::domain(format!("degree must be positive, got {x}")));
        }
        Ok(self.cdf_unchecked(x))
    }

    pub fn ccdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_nan() {
            return Err(Error::domain(format!("degree must be positive, got {x}")));
        }
        Ok(self.ccdf_unchecked(x))
    }

    fn cdf_unchecked(&self, x: f64) -> f64 {
        let v = match *self {
            ModelSpec::PowerLaw { .. }
            | ModelSpec::Exponential { .. }
            | ModelSpec::ParetoExpCutoff { .. } => 1.0 - self.ccdf_unchecked(x),
            ModelSpec::Lognormal { mu, sigma } => std_normal_cdf((x.ln() - mu) / sigma),
            ModelSpec::Pln { beta, mu, tau } => {
                let lx = x.ln();
                std_normal_cdf((lx - mu) / tau) + ln_t_low(beta, mu, tau, lx).exp()
            }
            ModelSpec::Lnp { alpha, mu, tau } => {
                let lx = x.ln();
                std_normal_cdf((lx - mu) / tau) - ln_t_up(alpha, mu, tau, lx).exp()
            }
            ModelSpec::Dpln {
                alpha,
                beta,
                mu,
                tau,
            } => {
                let lx = x.ln();
                let s = alpha + beta;
                std_normal_cdf((lx - mu) / tau) - beta / s * ln_t_up(alpha, mu, tau, lx).exp()
                    + alpha / s * ln_t_low(beta, mu, tau, lx).exp()
            }
        };
        v.clamp(0.0, 1.0)
    }

    fn ccdf_unchecked(&self, x: f64) -> f64 {
        let v = match *self {
            ModelSpec::PowerLaw { alpha, d0 } => {
                if x <= d0 {
                    1.0
                } else {
                    (x / d0).powf(1.0 - alpha)
                }
            }
            ModelSpec::Exponential { lambda, loc } => {
                if x <= loc {
                    1.0
                } else {
                    (-lambda * (x - loc)).exp()
                }
            }
            ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } => {
                if x <= d0 {
                    1.0
                } else {
                    (pec_ln_tail(alpha, lambda, x) - pec_ln_tail(alpha, lambda, d0)).exp()
                }
            }
            ModelSpec::Lognormal { mu, sigma } => std_normal_ccdf((x.ln() - mu) / sigma),
            ModelSpec::Pln { beta, mu, tau } => {
                let lx = x.ln();
                std_normal_ccdf((lx - mu) / tau) - ln_t_low(beta, mu, tau, lx).exp()
            }
            ModelSpec::Lnp { alpha, mu, tau } => {
                let lx = x.ln();
                std_normal_ccdf((lx - mu) / tau) + ln_t_up(alpha, mu, tau, lx).exp()
            }
            ModelSpec::Dpln {
                alpha,
                beta,
                mu,
                tau,
            } => {
                let lx = x.ln();
                let s = alpha + beta;
                std_normal_ccdf((lx - mu) / tau) + beta / s * ln_t_up(alpha, mu, tau, lx).exp()
                    - alpha / s * ln_t_low(beta, mu, tau, lx).exp()
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// Inverse cdf. Closed form where one exists, otherwise bisection on
    /// ln x against the cdf (lower half) or ccdf (upper half).
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {q}")));
        }
        match *self {
            ModelSpec::PowerLaw { alpha, d0 } => Ok(d0 * (1.0 - q).powf(-1.0 / (alpha - 1.0))),
            ModelSpec::Exponential { lambda, loc } => Ok(loc - (-q).ln_1p() / lambda),
            ModelSpec::Lognormal { .. }
            | ModelSpec::ParetoExpCutoff { .. }
            | ModelSpec::Pln { .. }
            | ModelSpec::Lnp { .. }
            | ModelSpec::Dpln { .. } => Ok(self.invert_numerically(q)),
        }
    }

    fn invert_numerically(&self, q: f64) -> f64 {
        let upper = q > 0.5;
        let target = if upper { 1.0 - q } else { q };
        // f(lx) > 0 means the point lies above the requested quantile.
        let above = |lx: f64| -> bool {
            let x = lx.exp();
            if upper {
                self.ccdf_unchecked(x) < target
            } else {
                self.cdf_unchecked(x) > target
            }
        };
        let floor = self.support_min();
        let mut lo = if floor > 0.0 { floor.ln() } else { -1.0 };
        let mut hi = lo.max(0.0) + 1.0;
        if floor <= 0.0 {
            while above(lo) && lo > -700.0 {
                lo -= (lo.abs()).max(1.0);
            }
        }
        while !above(hi) && hi < 700.0 {
            hi += hi.abs().max(1.0);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if above(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-14 * hi.abs().max(1.0) {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    /// Maps a uniform draw to a variate for the families with a closed-form
    /// inverse cdf (`u` is the upper-tail probability, so `u → 0` gives the
    /// largest values).
    pub fn from_uniform(&self, u: f64) -> Option<f64> {
        match *self {
            ModelSpec::PowerLaw { alpha, d0 } => Some(d0 * u.powf(-1.0 / (alpha - 1.0))),
            ModelSpec::Exponential { lambda, loc } => Some(loc - u.ln() / lambda),
            _ => None,
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind())?;
        for (i, (name, v)) in self.params().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={v}")?;
        }
        f.write_str(")")
    }
}

/// ln T_up: ln[x^(−α) e^(αμ+α²τ²/2) Φ(z − ατ)].
fn ln_t_up(alpha: f64, mu: f64, tau: f64, lx: f64) -> f64 {
    -alpha * lx + alpha * mu + 0.5 * alpha * alpha * tau * tau
        + ln_std_normal_cdf((lx - mu - alpha * tau * tau) / tau)
}

/// ln T_low: ln[x^β e^(−βμ+β²τ²/2) Φᶜ(z + βτ)].
fn ln_t_low(beta: f64, mu: f64, tau: f64, lx: f64) -> f64 {
    beta * lx - beta * mu + 0.5 * beta * beta * tau * tau
        + ln_std_normal_ccdf((lx - mu + beta * tau * tau) / tau)
}

/// ln ∫_x^∞ t^(−α) e^(−λt) dt, integrated over s = ln t.
pub(crate) fn pec_ln_tail(alpha: f64, lambda: f64, x: f64) -> f64 {
    let a = x.ln();
    // Past this point λe^s ≥ 800, so the integrand is below e^(−800) relative.
    let b = a.max((800.0 / lambda).ln()) + 1.0;
    let panels = (((b - a) / 0.2).ceil() as usize).clamp(8, 4000);
    ln_integral_exp(|s| (1.0 - alpha) * s - lambda * s.exp(), a, b, panels)
}

/// The PLN helper quantities `A = exp(−βμ + β²τ²/2)` and `z(x) = (ln x − μ)/τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlnAuxiliaries {
    pub beta: f64,
    pub mu: f64,
    pub tau: f64,
    pub a: f64,
}

impl PlnAuxiliaries {
    pub fn new(beta: f64, mu: f64, tau: f64) -> Result<Self> {
        ModelSpec::pln(beta, mu, tau)?;
        Ok(PlnAuxiliaries {
            beta,
            mu,
            tau,
            a: (-beta * mu + 0.5 * beta * beta * tau * tau).exp(),
        })
    }

    pub fn z(&self, x: f64) -> f64 {
        (x.ln() - self.mu) / self.tau
    }
}

/// `e^(μ + τ·normal − exponential/β)`: the PLN variate built from a standard
/// normal draw and a unit-mean exponential draw.
pub fn pln_variate(beta: f64, mu: f64, tau: f64, normal: f64, exp1: f64) -> f64 {
    (mu + tau * normal - exp1 / beta).exp()
}

/// `n` independent draws from `model`, reproducible for a fixed seed.
pub fn sample(model: &ModelSpec, n: usize, seed: u64) -> Result<DegreeSample> {
    let values = sample_values(model, n, seed)?;
    DegreeSample::from_values(&values)
}

/// Raw draws (no grouping), same stream as [`sample`].
pub fn sample_values(model: &ModelSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    if n == 0 {
        return Err(Error::invalid("n", 0.0, "at least one draw is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(draw(model, &mut rng));
    }
    Ok(out)
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // (0, 1]: never returns 0, so ln and negative powers stay finite.
    1.0 - rng.random::<f64>()
}

pub(crate) fn draw<R: Rng + ?Sized>(model: &ModelSpec, rng: &mut R) -> f64 {
    match *model {
        ModelSpec::PowerLaw { .. } | ModelSpec::Exponential { .. } => {
            let u = open_unit(rng);
            model.from_uniform(u).expect("closed-form family")
        }
        ModelSpec::Lognormal { mu, sigma } => {
            let z: f64 = StandardNormal.sample(rng);
            (mu + sigma * z).exp()
        }
        ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } => draw_pec(alpha, lambda, d0, rng),
        ModelSpec::Pln { beta, mu, tau } => {
            let z: f64 = StandardNormal.sample(rng);
            let e: f64 = Exp1.sample(rng);
            pln_variate(beta, mu, tau, z, e)
        }
        ModelSpec::Lnp { alpha, mu, tau } => {
            let z: f64 = StandardNormal.sample(rng);
            let e: f64 = Exp1.sample(rng);
            (mu + tau * z + e / alpha).exp()
        }
        ModelSpec::Dpln {
            alpha,
            beta,
            mu,
            tau,
        } => {
            let z: f64 = StandardNormal.sample(rng);
            let e1: f64 = Exp1.sample(rng);
            let e2: f64 = Exp1.sample(rng);
            (mu + tau * z + e1 / alpha - e2 / beta).exp()
        }
    }
}

/// Rejection sampling: a Pareto envelope thinned by e^(−λ(x−d0)) when the
/// power part is normalizable, otherwise a shifted exponential thinned by
/// (x/d0)^(−α).
fn draw_pec<R: Rng + ?Sized>(alpha: f64, lambda: f64, d0: f64, rng: &mut R) -> f64 {
    loop {
        let u = open_unit(rng);
        let v: f64 = rng.random();
        if alpha > 1.0 {
            let x = d0 * u.powf(-1.0 / (alpha - 1.0));
            if v < (-lambda * (x - d0)).exp() {
                return x;
            }
        } else {
            let x = d0 - u.ln() / lambda;
            if v < (x / d0).powf(-alpha) {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pdf_examples() {
        let pln = ModelSpec::pln(1.0, 0.0, 1.0).unwrap();
        let expected = 0.5f64.exp() * std_normal_ccdf(1.0);
        assert_relative_eq!(pln.pdf(1.0).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(pln.pdf(1.0).unwrap(), 0.26157, max_relative = 1e-4);

        let pl = ModelSpec::power_law(2.0, 1.0).unwrap();
        assert_relative_eq!(pl.pdf(1.0).unwrap(), 1.0, max_relative = 1e-15);

        let ex = ModelSpec::exponential(1.0).unwrap();
        assert_relative_eq!(ex.pdf(1e-12).unwrap(), 1.0, max_relative = 1e-11);
    }

    #[test]
    fn cdf_examples() {
        let pln = ModelSpec::pln(1.0, 0.0, 1.0).unwrap();
        let expected = 0.5 + 0.5f64.exp() * std_normal_ccdf(1.0);
        assert_relative_eq!(pln.cdf(1.0).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(pln.cdf(1.0).unwrap(), 0.76157, max_relative = 1e-4);
        let pl = ModelSpec::power_law(2.0, 1.0).unwrap();
        assert_eq!(pl.cdf(1.0).unwrap(), 0.0);
        let ex = ModelSpec::exponential(2.0).unwrap();
        assert_relative_eq!(ex.cdf(2f64.ln() / 2.0).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn rejects_points_outside_support() {
        let pl = ModelSpec::power_law(2.5, 3.0).unwrap();
        assert!(pl.pdf(2.0).is_err());
        assert!(pl.pdf(0.0).is_err());
        assert!(ModelSpec::lognormal(0.0, 1.0).unwrap().pdf(-1.0).is_err());
        assert!(ModelSpec::pln(1.0, 0.0, 1.0).unwrap().cdf(0.0).is_err());
        let pec = ModelSpec::pareto_exp_cutoff(1.5, 0.1, 2.0).unwrap();
        assert!(pec.pdf(1.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelSpec::power_law(1.0, 1.0).is_err());
        assert!(ModelSpec::power_law(2.0, 0.0).is_err());
        assert!(ModelSpec::lognormal(0.0, 0.0).is_err());
        assert!(ModelSpec::pln(-1.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::dpln(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn uniform_and_variate_examples() {
        // tail exponent α−1 = 2 gives u^(−1/2)
        let pl = ModelSpec::power_law(3.0, 1.0).unwrap();
        assert_relative_eq!(pl.from_uniform(0.25).unwrap(), 2.0, max_relative = 1e-15);
        let ex = ModelSpec::exponential(1.0).unwrap();
        assert_relative_eq!(ex.from_uniform((-1.0f64).exp()).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(pln_variate(1.0, 0.0, 1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn power_law_quantile_closed_form() {
        let pl = ModelSpec::power_law(2.0, 1.0).unwrap();
        assert_relative_eq!(pl.quantile(0.99).unwrap(), 100.0, max_relative = 1e-12);
        let pl = ModelSpec::power_law(3.0, 1.0).unwrap();
        assert_relative_eq!(pl.quantile(0.99).unwrap(), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn numeric_quantile_inverts_cdf() {
        let models = [
            ModelSpec::pln(1.2, 4.0, 1.0).unwrap(),
            ModelSpec::lnp(2.0, 1.0, 0.5).unwrap(),
            ModelSpec::dpln(2.5, 1.5, 3.0, 0.8).unwrap(),
            ModelSpec::pareto_exp_cutoff(1.5, 0.01, 1.0).unwrap(),
            ModelSpec::lognormal(2.0, 1.5).unwrap(),
        ];
        for m in models {
            for &q in &[1e-4, 0.1, 0.5, 0.9, 0.999] {
                let x = m.quantile(q).unwrap();
                let back = if q > 0.5 { 1.0 - m.ccdf(x).unwrap() } else { m.cdf(x).unwrap() };
                assert!((back - q).abs() < 1e-9, "{m} q={q} back={back}");
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let m = ModelSpec::pln(1.5, 2.0, 0.7).unwrap();
        let a = sample_values(&m, 1000, 7).unwrap();
        let b = sample_values(&m, 1000, 7).unwrap();
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert!(a.iter().all(|&v| v > 0.0));
        let c = sample_values(&m, 1000, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn model_spec_params_round_trip() {
        let m = ModelSpec::dpln(2.0, 1.0, 3.0, 0.5).unwrap();
        let params = m.params();
        assert_eq!(ModelSpec::from_params(m.kind(), &params).unwrap(), m);
        assert_eq!(ModelKind::parse("PLN"), Some(ModelKind::Pln));
        assert_eq!(ModelKind::parse("power-law"), Some(ModelKind::PowerLaw));
        assert_eq!(ModelKind::parse("nope"), None);
    }
}
