//! Parameter estimation and goodness-of-fit scoring.
//!
//! The elementary families use closed-form continuous maximum likelihood
//! with the location anchored at the sample minimum. The Pareto-mixture
//! families (PLN, LNP, DPLN) and the Pareto with exponential cutoff are fitted
//! by a deterministic grid search over the reverse log-likelihood: an outer
//! log-spaced grid over the Pareto exponent(s), an inner (μ, τ) grid seeded
//! from the log-scale moment identities, then refinement rounds that shrink
//! every range around the incumbent.

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{pec_ln_tail, ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::sample::DegreeSample;
use crate::special::{ln_std_normal_ccdf, ln_std_normal_cdf};

/// Floor applied to every density value before its logarithm is taken.
pub const PDF_FLOOR: f64 = 1e-300;

fn ln_pdf_floor() -> f64 {
    PDF_FLOOR.ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: ModelSpec,
    /// The minimized −ln L.
    pub reverse_log_likelihood: f64,
    pub aic: f64,
    pub rss: f64,
    /// Free-parameter count used in the AIC.
    pub k: usize,
    /// Set when a spread parameter had to be clamped to its floor.
    pub degenerate: bool,
    /// Grid fits only: best objective per value of the outer exponent in the
    /// first stage (β for PLN/DPLN, α for LNP and the cutoff model).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<(f64, f64)>,
    /// Grid fits only: best objective after each stage of the search proper
    /// (a final full-sample round after compressed stages is not listed).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stage_bests: Vec<f64>,
}

impl FitReport {
    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    fn score(model: ModelSpec, sample: &DegreeSample, rss_mode: RssMode, degenerate: bool) -> Self {
        let k = model.kind().free_param_count();
        let rll = reverse_log_likelihood(&model, sample);
        FitReport {
            model,
            reverse_log_likelihood: rll,
            aic: aic(rll, k),
            rss: match rss_mode {
                RssMode::Pdf => rss(&model, sample),
                RssMode::Ccdf => rss_ccdf(&model, sample),
            },
            k,
            degenerate,
            profile: Vec::new(),
            stage_bests: Vec::new(),
        }
    }
}

/// Which empirical curve the residual sum of squares compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum RssMode {
    /// Empirical pmf against the model density at each distinct degree.
    #[default]
    Pdf,
    /// Empirical P(X ≥ x) against the model ccdf.
    Ccdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    pub rss_mode: RssMode,
    /// Floor for σ (lognormal) and the mean excess (exponential, power law)
    /// on degenerate samples.
    pub spread_floor: f64,
    /// Overrides the power-law lower cutoff (defaults to the sample minimum).
    pub d0: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            rss_mode: RssMode::Pdf,
            spread_floor: 1e-3,
            d0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    /// Log-spaced points per Pareto exponent in the first stage.
    pub outer_points: usize,
    pub outer_min: f64,
    pub outer_max: f64,
    /// Points per axis of the local (μ, τ) grid.
    pub inner_points: usize,
    /// Half-width of the first-stage local grid relative to its seed.
    pub inner_rel_halfwidth: f64,
    pub refinements: usize,
    pub shrink: f64,
    pub tau_floor: f64,
    /// DPLN has two exponents; its grids are coarser to keep the cell count
    /// comparable.
    pub dpln_outer_points: usize,
    pub dpln_inner_points: usize,
    /// Samples with more distinct values than this are searched on that many
    /// equal-count bins, followed by one round on the full sample. 0 disables.
    pub compress_above: usize,
    /// Points per axis of that full-sample round.
    pub polish_points: usize,
    pub options: FitOptions,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            outer_points: 64,
            outer_min: 0.05,
            outer_max: 10.0,
            inner_points: 21,
            inner_rel_halfwidth: 0.5,
            refinements: 2,
            shrink: 4.0,
            tau_floor: 1e-3,
            dpln_outer_points: 16,
            dpln_inner_points: 11,
            compress_above: 2048,
            polish_points: 9,
            options: FitOptions::default(),
        }
    }
}

/// −Σ ln f(dᵢ). `+∞` when some observation lies outside the support; inside
/// the support each density is floored at [`PDF_FLOOR`].
pub fn reverse_log_likelihood(model: &ModelSpec, sample: &DegreeSample) -> f64 {
    let floor = ln_pdf_floor();
    if let ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } = *model {
        if sample.d0() < d0 {
            return f64::INFINITY;
        }
        let ln_z = pec_ln_tail(alpha, lambda, d0);
        return -sample
            .unique()
            .iter()
            .map(|&(x, c)| c as f64 * (-alpha * x.ln() - lambda * x - ln_z).max(floor))
            .sum::<f64>();
    }
    let mut total = 0.0;
    for &(x, c) in sample.unique() {
        let lp = model.ln_pdf_unchecked(x);
        if lp == f64::NEG_INFINITY && x < model.support_min() {
            return f64::INFINITY;
        }
        total += c as f64 * lp.max(floor);
    }
    -total
}

/// The four sums of the PLN log-likelihood,
/// `n ln β + (β−1) Σ ln xᵢ + n A₀ + Σ ln Φᶜ((ln xᵢ − μ + βτ²)/τ)` with
/// `A₀ = −βμ + β²τ²/2`, returned separately.
pub fn pln_log_likelihood_terms(beta: f64, mu: f64, tau: f64, sample: &DegreeSample) -> [f64; 4] {
    let n = sample.n() as f64;
    let a0 = -beta * mu + 0.5 * beta * beta * tau * tau;
    let tail: f64 = sample
        .unique()
        .iter()
        .map(|&(x, c)| c as f64 * ln_std_normal_ccdf((x.ln() - mu + beta * tau * tau) / tau))
        .sum();
    [n * beta.ln(), (beta - 1.0) * sample.sum_log(), n * a0, tail]
}

/// AIC = 2k + 2·(−ln L).
pub fn aic(reverse_log_likelihood: f64, k: usize) -> f64 {
    2.0 * k as f64 + 2.0 * reverse_log_likelihood
}

/// Σ over distinct degrees of (empirical pmf − model density)².
pub fn rss(model: &ModelSpec, sample: &DegreeSample) -> f64 {
    let ln_z = match *model {
        ModelSpec::ParetoExpCutoff { alpha, lambda, d0 } => Some(pec_ln_tail(alpha, lambda, d0)),
        _ => None,
    };
    let n = sample.n() as f64;
    sample
        .unique()
        .iter()
        .map(|&(x, c)| {
            let f = match (*model, ln_z) {
                (ModelSpec::ParetoExpCutoff { alpha, lambda, d0 }, Some(lz)) => {
                    if x < d0 {
                        0.0
                    } else {
                        (-alpha * x.ln() - lambda * x - lz).exp()
                    }
                }
                _ => model.ln_pdf_unchecked(x).exp(),
            };
            (c as f64 / n - f).powi(2)
        })
        .sum()
}

/// Σ over distinct degrees of (empirical P(X ≥ x) − model ccdf(x))².
pub fn rss_ccdf(model: &ModelSpec, sample: &DegreeSample) -> f64 {
    sample
        .empirical_ccdf()
        .into_iter()
        .map(|(x, p)| (p - model.ccdf(x).unwrap_or(1.0)).powi(2))
        .sum()
}

/// Points of a quantile–quantile plot at levels q = i/(n+1), i = 1..=n:
/// (model quantile, empirical order statistic).
pub fn qq_points(model: &ModelSpec, sample: &DegreeSample, n_quantiles: usize) -> Result<Vec<(f64, f64)>> {
    qq_points_by(|q| model.quantile(q), sample, n_quantiles)
}

/// [`qq_points`] with an arbitrary quantile function on the model axis.
pub fn qq_points_by<F>(quantile: F, sample: &DegreeSample, n_quantiles: usize) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    if n_quantiles < 2 {
        return Err(Error::invalid("n_quantiles", n_quantiles as f64, "need at least two levels"));
    }
    let n = sample.n();
    (1..=n_quantiles)
        .map(|i| {
            let q = i as f64 / (n_quantiles + 1) as f64;
            let k = (q * n as f64).ceil() as usize;
            Ok((quantile(q)?, sample.order_statistic(k)))
        })
        .collect()
}

pub fn fit_elementary(sample: &DegreeSample, kind: ModelKind) -> Result<FitReport> {
    fit_elementary_with(sample, kind, &FitOptions::default())
}

pub fn fit_elementary_with(sample: &DegreeSample, kind: ModelKind, opts: &FitOptions) -> Result<FitReport> {
    let n = sample.n() as f64;
    let floor = opts.spread_floor;
    let (model, degenerate) = match kind {
        ModelKind::PowerLaw => {
            let d0 = opts.d0.unwrap_or(sample.d0());
            if !(d0 > 0.0) || d0 > sample.d0() {
                return Err(Error::domain(format!(
                    "power-law cutoff d0 = {d0} must be positive and at most the sample minimum {}",
                    sample.d0()
                )));
            }
            let spread = sample.sum_log() - n * d0.ln();
            let degenerate = spread < n * floor;
            let alpha = 1.0 + n / spread.max(n * floor);
            (ModelSpec::power_law(alpha, d0)?, degenerate)
        }
        ModelKind::Lognormal => {
            let sigma = sample.log_var().sqrt();
            let degenerate = sigma < floor;
            (ModelSpec::lognormal(sample.log_mean(), sigma.max(floor))?, degenerate)
        }
        ModelKind::Exponential => {
            let loc = sample.d0();
            let excess = sample.mean() - loc;
            let degenerate = excess < floor;
            let model = ModelSpec::Exponential {
                lambda: 1.0 / excess.max(floor),
                loc,
            }
            .validated()?;
            (model, degenerate)
        }
        other => {
            return Err(Error::domain(format!("{other} has no closed-form estimator; use fit_grid")));
        }
    };
    if degenerate {
        log::warn!("degenerate sample: {kind} spread clamped to {floor}");
    }
    Ok(FitReport::score(model, sample, opts.rss_mode, degenerate))
}

/// Fits any of the seven families, dispatching to the closed-form or grid
/// estimator.
pub fn fit(sample: &DegreeSample, kind: ModelKind, grid: &GridConfig) -> Result<FitReport> {
    match kind {
        ModelKind::PowerLaw | ModelKind::Lognormal | ModelKind::Exponential => {
            fit_elementary_with(sample, kind, &grid.options)
        }
        _ => fit_grid(sample, kind, grid),
    }
}

pub fn fit_all(sample: &DegreeSample, kinds: &[ModelKind], grid: &GridConfig) -> Result<Vec<FitReport>> {
    kinds.iter().map(|&k| fit(sample, k, grid)).collect()
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

/// One evaluated grid cell. `lo` is the lower-tail exponent (β), `hi` the
/// upper-tail exponent (α, or the cutoff model's power exponent); for the
/// cutoff model `mu` holds λ and `tau` is unused.
#[derive(Debug, Clone, Copy)]
struct Cell {
    obj: f64,
    lo: f64,
    hi: f64,
    tau: f64,
    mu: f64,
}

impl Cell {
    /// Lowest objective, then smallest β, α, τ, μ.
    fn better_than(&self, other: &Cell) -> bool {
        let key = |c: &Cell| (c.obj, c.lo, c.hi, c.tau, c.mu);
        let (a, b) = (key(self), key(other));
        if !a.0.is_finite() {
            return false;
        }
        if !b.0.is_finite() {
            return true;
        }
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.total_cmp(&b.3))
            .then(a.4.total_cmp(&b.4))
            .is_lt()
    }
}

fn best_of(cells: impl IntoIterator<Item = Cell>) -> Option<Cell> {
    let mut best: Option<Cell> = None;
    for c in cells {
        if best.is_none_or(|b| c.better_than(&b)) {
            best = Some(c);
        }
    }
    best.filter(|b| b.obj.is_finite())
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn lin_grid(center: f64, half: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![center];
    }
    (0..n).map(|i| center - half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
}

/// Precomputed per-distinct-degree data shared by every objective call.
struct FitData {
    ln_x: Vec<f64>,
    counts: Vec<f64>,
    n: f64,
    sum_log: f64,
    sum_x: f64,
    d0: f64,
}

impl FitData {
    fn new(sample: &DegreeSample) -> Self {
        let unique = sample.unique();
        FitData {
            ln_x: unique.iter().map(|u| u.0.ln()).collect(),
            counts: unique.iter().map(|u| u.1 as f64).collect(),
            ..FitData::new_summary(sample)
        }
    }

    /// Equal-count bins over the sorted sample, each represented by the
    /// geometric mean of its members. Σ ln x is preserved exactly.
    fn compressed(sample: &DegreeSample, bins: usize) -> Self {
        let sorted = sample.sorted();
        let n = sorted.len();
        let mut ln_x = Vec::with_capacity(bins);
        let mut counts = Vec::with_capacity(bins);
        for b in 0..bins {
            let (lo, hi) = (b * n / bins, (b + 1) * n / bins);
            if hi > lo {
                let s: f64 = sorted[lo..hi].iter().map(|v| v.ln()).sum();
                ln_x.push(s / (hi - lo) as f64);
                counts.push((hi - lo) as f64);
            }
        }
        FitData {
            ln_x,
            counts,
            ..FitData::new_summary(sample)
        }
    }

    fn new_summary(sample: &DegreeSample) -> Self {
        FitData {
            ln_x: Vec::new(),
            counts: Vec::new(),
            n: sample.n() as f64,
            sum_log: sample.sum_log(),
            sum_x: sample.unique().iter().map(|&(x, c)| x * c as f64).sum(),
            d0: sample.d0(),
        }
    }

    fn pln(&self, beta: f64, mu: f64, tau: f64) -> f64 {
        let head = beta.ln() - beta * mu + 0.5 * beta * beta * tau * tau;
        let shift = -mu + beta * tau * tau;
        let floor = ln_pdf_floor();
        let mut ll = 0.0;
        for (lx, c) in self.ln_x.iter().zip(&self.counts) {
            let v = head + (beta - 1.0) * lx + ln_std_normal_ccdf((lx + shift) / tau);
            ll += c * v.max(floor);
        }
        -ll
    }

    fn lnp(&self, alpha: f64, mu: f64, tau: f64) -> f64 {
        let head = alpha.ln() + alpha * mu + 0.5 * alpha * alpha * tau * tau;
        let shift = -mu - alpha * tau * tau;
        let floor = ln_pdf_floor();
        let mut ll = 0.0;
        for (lx, c) in self.ln_x.iter().zip(&self.counts) {
            let v = head - (alpha + 1.0) * lx + ln_std_normal_cdf((lx + shift) / tau);
            ll += c * v.max(floor);
        }
        -ll
    }

    fn dpln(&self, alpha: f64, beta: f64, mu: f64, tau: f64) -> f64 {
        let t2 = tau * tau;
        let head = (alpha * beta / (alpha + beta)).ln();
        let up0 = alpha * mu + 0.5 * alpha * alpha * t2;
        let low0 = -beta * mu + 0.5 * beta * beta * t2;
        let floor = ln_pdf_floor();
        let mut ll = 0.0;
        for (lx, c) in self.ln_x.iter().zip(&self.counts) {
            let z = (lx - mu) / tau;
            let up = up0 - alpha * lx + ln_std_normal_cdf(z - alpha * tau);
            let low = low0 + beta * lx + ln_std_normal_ccdf(z + beta * tau);
            let (hi, lo) = if up > low { (up, low) } else { (low, up) };
            let v = head - lx + hi + (lo - hi).exp().ln_1p();
            ll += c * v.max(floor);
        }
        -ll
    }

    fn pec(&self, alpha: f64, lambda: f64) -> f64 {
        let ln_z = pec_ln_tail(alpha, lambda, self.d0);
        alpha * self.sum_log + lambda * self.sum_x + self.n * ln_z
    }
}

/// Grid-search MLE for the cutoff and Pareto-mixture families.
pub fn fit_grid(sample: &DegreeSample, kind: ModelKind, grid: &GridConfig) -> Result<FitReport> {
    validate_grid(grid)?;
    let data = FitData::new(sample);
    let (best, profile, stage_bests) = match kind {
        ModelKind::Pln | ModelKind::Lnp | ModelKind::Dpln => {
            if grid.compress_above > 0 && sample.unique().len() > grid.compress_above {
                let coarse = FitData::compressed(sample, grid.compress_above);
                search_mixture(&coarse, Some(&data), sample, kind, grid)?
            } else {
                search_mixture(&data, None, sample, kind, grid)?
            }
        }
        ModelKind::ParetoExpCutoff => search_cutoff(&data, sample, grid)?,
        other => {
            return Err(Error::domain(format!("{other} is fitted in closed form; use fit_elementary")));
        }
    };
    let tau_clamped = matches!(kind, ModelKind::Pln | ModelKind::Lnp | ModelKind::Dpln)
        && best.tau <= grid.tau_floor * (1.0 + 1e-12);
    let model = match kind {
        ModelKind::Pln => ModelSpec::pln(best.lo, best.mu, best.tau)?,
        ModelKind::Lnp => ModelSpec::lnp(best.hi, best.mu, best.tau)?,
        ModelKind::Dpln => ModelSpec::dpln(best.hi, best.lo, best.mu, best.tau)?,
        _ => ModelSpec::pareto_exp_cutoff(best.hi, best.mu, sample.d0())?,
    };
    let mut report = FitReport::score(model, sample, grid.options.rss_mode, tau_clamped);
    report.profile = profile;
    report.stage_bests = stage_bests;
    Ok(report)
}

fn validate_grid(grid: &GridConfig) -> Result<()> {
    if !(grid.outer_min > 0.0 && grid.outer_max > grid.outer_min) {
        return Err(Error::invalid("outer_min", grid.outer_min, "exponent range must be positive and nonempty"));
    }
    if grid.outer_points == 0 || grid.inner_points == 0 || grid.dpln_outer_points == 0 || grid.dpln_inner_points == 0 || grid.polish_points == 0 {
        return Err(Error::invalid("points", 0.0, "grid axes need at least one point"));
    }
    if !(grid.inner_rel_halfwidth > 0.0) || !(grid.shrink > 1.0) || !(grid.tau_floor > 0.0) {
        return Err(Error::invalid("grid", grid.shrink, "halfwidth, shrink factor and tau floor must be positive (shrink > 1)"));
    }
    Ok(())
}

type SearchOutcome = (Cell, Vec<(f64, f64)>, Vec<f64>);

/// Log-scale moment seeds: ln X = μ + τZ + E₁/α − E₂/β, so
/// E[ln X] = μ + 1/α − 1/β and Var[ln X] = τ² + 1/α² + 1/β².
fn moment_seed(kind: ModelKind, nu: f64, var: f64, lo: f64, hi: f64, tau_floor: f64) -> (f64, f64) {
    let (inv_lo, inv_hi) = match kind {
        ModelKind::Pln => (1.0 / lo, 0.0),
        ModelKind::Lnp => (0.0, 1.0 / hi),
        _ => (1.0 / lo, 1.0 / hi),
    };
    let mu = nu - inv_hi + inv_lo;
    let tau2 = (var - inv_hi * inv_hi - inv_lo * inv_lo).max(tau_floor * tau_floor);
    (mu, tau2.sqrt())
}

/// Runs every stage on `data`; when `polish` is given, one extra round at the
/// last refinement's resolution is evaluated on it (the full sample).
fn search_mixture(
    data: &FitData,
    polish: Option<&FitData>,
    sample: &DegreeSample,
    kind: ModelKind,
    grid: &GridConfig,
) -> Result<SearchOutcome> {
    let (outer_n, inner_n) = if kind == ModelKind::Dpln {
        (grid.dpln_outer_points, grid.dpln_inner_points)
    } else {
        (grid.outer_points, grid.inner_points)
    };
    let nu = sample.log_mean();
    let var = sample.log_var();
    let floor = grid.tau_floor;

    let eval_on = |data: &FitData, lo: f64, hi: f64, mu: f64, tau: f64| -> Cell {
        let obj = match kind {
            ModelKind::Pln => data.pln(lo, mu, tau),
            ModelKind::Lnp => data.lnp(hi, mu, tau),
            _ => data.dpln(hi, lo, mu, tau),
        };
        Cell {
            obj: if obj.is_nan() { f64::INFINITY } else { obj },
            lo,
            hi,
            tau,
            mu,
        }
    };
    let eval = |lo: f64, hi: f64, mu: f64, tau: f64| eval_on(data, lo, hi, mu, tau);

    // Outer exponent pairs (lo = β, hi = α); unused axes are pinned at 0.
    let pairs = |lo_axis: &[f64], hi_axis: &[f64]| -> Vec<(f64, f64)> {
        match kind {
            ModelKind::Pln => lo_axis.iter().map(|&b| (b, 0.0)).collect(),
            ModelKind::Lnp => hi_axis.iter().map(|&a| (0.0, a)).collect(),
            _ => lo_axis
                .iter()
                .flat_map(|&b| hi_axis.iter().map(move |&a| (b, a)))
                .collect(),
        }
    };

    // Stage 1: moment-seeded local grids.
    let axis = log_grid(grid.outer_min, grid.outer_max, outer_n);
    let outer = pairs(&axis, &axis);
    let stage1: Vec<Vec<Cell>> = outer
        .par_iter()
        .map(|&(lo, hi)| {
            let (mu0, tau0) = moment_seed(kind, nu, var, lo, hi, floor);
            let mu_half = grid.inner_rel_halfwidth * mu0.abs().max(tau0);
            let tau_half = grid.inner_rel_halfwidth * tau0;
            let mut cells = Vec::with_capacity(inner_n * inner_n);
            for tau in lin_grid(tau0, tau_half, inner_n) {
                let tau = tau.max(floor);
                for mu in lin_grid(mu0, mu_half, inner_n) {
                    cells.push(eval(lo, hi, mu, tau));
                }
            }
            cells
        })
        .collect();

    let profile_key = |c: &Cell| if kind == ModelKind::Lnp { c.hi } else { c.lo };
    let mut profile: Vec<(f64, f64)> = Vec::new();
    for cells in &stage1 {
        if let Some(b) = best_of(cells.iter().copied()) {
            let key = profile_key(&b);
            match profile.iter_mut().find(|p| p.0 == key) {
                Some(p) => p.1 = p.1.min(b.obj),
                None => profile.push((key, b.obj)),
            }
        }
    }
    profile.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = best_of(stage1.into_iter().flatten()).ok_or_else(|| {
        Error::NonFiniteObjective(format!(
            "{kind}: exponents in [{}, {}] with moment-seeded mu/tau",
            grid.outer_min, grid.outer_max
        ))
    })?;
    let mut stage_bests = vec![best.obj];

    // Refinement: shrink every range around the incumbent.
    let mut log_half = 0.5 * (grid.outer_max / grid.outer_min).ln();
    let (mu0, tau0) = moment_seed(kind, nu, var, best.lo, best.hi, floor);
    let mut mu_half = grid.inner_rel_halfwidth * mu0.abs().max(tau0);
    let mut tau_half = grid.inner_rel_halfwidth * best.tau;
    let rounds = grid.refinements + usize::from(polish.is_some());
    for round in 0..rounds {
        let on = if round < grid.refinements {
            log_half /= grid.shrink;
            mu_half /= grid.shrink;
            tau_half /= grid.shrink;
            data
        } else {
            let full = polish.expect("polish round without data");
            best = eval_on(full, best.lo, best.hi, best.mu, best.tau);
            full
        };
        let polishing = round >= grid.refinements;
        let (axis_n, cell_n) = match (polishing, kind) {
            (false, _) => (outer_n, inner_n),
            (true, ModelKind::Dpln) => (grid.polish_points / 2 + 1, grid.polish_points.min(7)),
            (true, _) => (grid.polish_points, grid.polish_points),
        };
        let around = |v: f64| log_grid(v * (-log_half).exp(), v * log_half.exp(), axis_n);
        let lo_axis = if best.lo > 0.0 { around(best.lo) } else { vec![0.0] };
        let hi_axis = if best.hi > 0.0 { around(best.hi) } else { vec![0.0] };
        let inc = best;
        let cells: Vec<Cell> = pairs(&lo_axis, &hi_axis)
            .par_iter()
            .flat_map_iter(|&(lo, hi)| {
                // Follow the moment identity as the exponents move.
                let inv = |v: f64| if v > 0.0 { 1.0 / v } else { 0.0 };
                let mu_c = inc.mu + (inv(lo) - inv(inc.lo)) - (inv(hi) - inv(inc.hi));
                let taus = lin_grid(inc.tau, tau_half, cell_n);
                let mus = lin_grid(mu_c, mu_half, cell_n);
                taus.into_iter().flat_map(move |tau| {
                    let tau = tau.max(floor);
                    mus.clone().into_iter().map(move |mu| eval_on(on, lo, hi, mu, tau))
                })
            })
            .collect();
        if let Some(b) = best_of(cells) {
            if b.better_than(&best) {
                best = b;
            }
        }
        if round < grid.refinements {
            stage_bests.push(best.obj);
        }
    }
    Ok((best, profile, stage_bests))
}

fn search_cutoff(data: &FitData, sample: &DegreeSample, grid: &GridConfig) -> Result<SearchOutcome> {
    let excess = (sample.mean() - sample.d0()).max(grid.options.spread_floor);
    let lambda0 = 1.0 / excess;
    let inner_n = grid.inner_points;
    let eval = |alpha: f64, lambda: f64| -> Cell {
        let obj = data.pec(alpha, lambda);
        Cell {
            obj: if obj.is_nan() { f64::INFINITY } else { obj },
            lo: 0.0,
            hi: alpha,
            tau: 0.0,
            mu: lambda,
        }
    };
    // λ spans four decades below the exponential-tail estimate (pure power
    // law is the λ → 0 limit) and one above.
    let mut lam_lo = lambda0 * 1e-4;
    let mut lam_hi = lambda0 * 1e1;
    let alphas = log_grid(grid.outer_min, grid.outer_max, grid.outer_points);
    let lambdas = log_grid(lam_lo, lam_hi, inner_n);
    let stage1: Vec<Cell> = alphas
        .par_iter()
        .flat_map_iter(|&a| lambdas.iter().map(move |&l| eval(a, l)))
        .collect();
    let mut profile: Vec<(f64, f64)> = alphas
        .iter()
        .filter_map(|&a| {
            best_of(stage1.iter().copied().filter(|c| c.hi == a)).map(|b| (a, b.obj))
        })
        .collect();
    profile.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = best_of(stage1).ok_or_else(|| {
        Error::NonFiniteObjective(format!(
            "pareto_exp_cutoff: alpha in [{}, {}], lambda in [{lam_lo:e}, {lam_hi:e}]",
            grid.outer_min, grid.outer_max
        ))
    })?;
    let mut stage_bests = vec![best.obj];
    let mut a_half = 0.5 * (grid.outer_max / grid.outer_min).ln();
    let mut l_half = 0.5 * (lam_hi / lam_lo).ln();
    for _ in 0..grid.refinements {
        a_half /= grid.shrink;
        l_half /= grid.shrink;
        let alphas = log_grid(best.hi * (-a_half).exp(), best.hi * a_half.exp(), grid.outer_points);
        lam_lo = best.mu * (-l_half).exp();
        lam_hi = best.mu * l_half.exp();
        let lambdas = log_grid(lam_lo, lam_hi, inner_n);
        let cells: Vec<Cell> = alphas
            .par_iter()
            .flat_map_iter(|&a| lambdas.iter().map(move |&l| eval(a, l)))
            .collect();
        if let Some(b) = best_of(cells) {
            if b.better_than(&best) {
                best = b;
            }
        }
        stage_bests.push(best.obj);
    }
    Ok((best, profile, stage_bests))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn power_law_closed_form_with_forced_cutoff() {
        let s = DegreeSample::from_values(&[E, E, E, E]).unwrap();
        let opts = FitOptions {
            d0: Some(1.0),
            ..FitOptions::default()
        };
        let r = fit_elementary_with(&s, ModelKind::PowerLaw, &opts).unwrap();
        match r.model {
            ModelSpec::PowerLaw { alpha, d0 } => {
                assert_relative_eq!(alpha, 2.0, max_relative = 1e-14);
                assert_eq!(d0, 1.0);
            }
            _ => unreachable!(),
        }
        assert!(!r.degenerate);
    }

    #[test]
    fn degenerate_lognormal_is_flagged() {
        let s = DegreeSample::from_degrees(&[1, 1, 1, 1]).unwrap();
        let r = fit_elementary(&s, ModelKind::Lognormal).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.model, ModelSpec::Lognormal { mu: 0.0, sigma: 1e-3 });
        assert!(r.aic.is_finite() && r.rss.is_finite());
        let r = fit_elementary(&s, ModelKind::Exponential).unwrap();
        assert!(r.degenerate);
        let r = fit_elementary(&s, ModelKind::PowerLaw).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn reverse_log_likelihood_examples() {
        let s = DegreeSample::from_degrees(&[1, 1]).unwrap();
        let ex = ModelSpec::exponential(1.0).unwrap();
        assert_relative_eq!(reverse_log_likelihood(&ex, &s), 2.0, max_relative = 1e-14);

        let s = DegreeSample::from_degrees(&[1, 1]).unwrap();
        let pl = ModelSpec::power_law(2.0, 1.0).unwrap();
        assert!(reverse_log_likelihood(&pl, &s).abs() < 1e-15);

        let pln = ModelSpec::pln(1.0, 0.0, 1.0).unwrap();
        let one = reverse_log_likelihood(&pln, &s) / 2.0;
        assert_relative_eq!(one, -pln.pdf(1.0).unwrap().ln(), max_relative = 1e-13);
        assert_relative_eq!(pln.pdf(1.0).unwrap(), 0.26157, max_relative = 1e-4);
        assert_relative_eq!(one, 1.34102, max_relative = 1e-5);
    }

    #[test]
    fn out_of_support_is_infinite() {
        let s = DegreeSample::from_degrees(&[1, 5]).unwrap();
        let pl = ModelSpec::power_law(2.0, 2.0).unwrap();
        assert_eq!(reverse_log_likelihood(&pl, &s), f64::INFINITY);
        let pec = ModelSpec::pareto_exp_cutoff(1.0, 0.1, 2.0).unwrap();
        assert_eq!(reverse_log_likelihood(&pec, &s), f64::INFINITY);
    }

    #[test]
    fn aic_examples() {
        assert_eq!(aic(0.0, 3), 6.0);
        assert!((aic(8.75338e4, 1) - 1.75069e5).abs() < 5.0);
        assert!((aic(7.74057e4, 3) - 1.54817e5).abs() < 5.0);
    }

    #[test]
    fn rss_examples() {
        let s = DegreeSample::from_degrees(&[1, 1]).unwrap();
        let ex = ModelSpec::exponential(1.0).unwrap();
        let expected = (1.0 - (-1.0f64).exp()).powi(2);
        assert_relative_eq!(rss(&ex, &s), expected, max_relative = 1e-14);
        assert_relative_eq!(rss(&ex, &s), 0.3996, max_relative = 1e-3);
        // a density that matches the pmf exactly at every observed degree
        let s = DegreeSample::from_degrees(&[1, 1, 1, 1]).unwrap();
        let one = ModelSpec::Exponential { lambda: 1.0, loc: 1.0 };
        assert_eq!(rss(&one, &s), 0.0);
    }

    #[test]
    fn two_point_sample_grid_fits_are_finite() {
        let s = DegreeSample::from_degrees(&[1, 2]).unwrap();
        for kind in [ModelKind::ParetoExpCutoff, ModelKind::Lnp, ModelKind::Pln, ModelKind::Dpln] {
            let r = fit_grid(&s, kind, &GridConfig::default()).unwrap();
            assert!(r.reverse_log_likelihood.is_finite(), "{kind}");
            assert!(r.aic.is_finite() && r.rss.is_finite(), "{kind}");
        }
    }

    #[test]
    fn grid_rejects_bad_config() {
        let s = DegreeSample::from_degrees(&[1, 2, 3]).unwrap();
        let bad = GridConfig {
            outer_min: 0.0,
            ..GridConfig::default()
        };
        assert!(fit_grid(&s, ModelKind::Pln, &bad).is_err());
        assert!(fit_grid(&s, ModelKind::PowerLaw, &GridConfig::default()).is_err());
        assert!(fit_elementary(&s, ModelKind::Pln).is_err());
    }

    #[test]
    fn power_law_qq_example() {
        let pl = ModelSpec::power_law(2.0, 1.0).unwrap();
        // tail exponent 1: (1/(1−q))^(1/(α−1))
        assert_relative_eq!(pl.quantile(0.99).unwrap(), 100.0, max_relative = 1e-12);
        let s = DegreeSample::from_degrees(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).unwrap();
        assert!(qq_points(&pl, &s, 1).is_err());
        assert_eq!(qq_points(&pl, &s, 9).unwrap().len(), 9);
    }
}
