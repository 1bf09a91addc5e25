//! Composite Gauss–Legendre quadrature.

use std::sync::OnceLock;

const ORDER: usize = 10;

fn nodes() -> &'static [(f64, f64); ORDER] {
    static NODES: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    NODES.get_or_init(|| {
        let mut out = [(0.0, 0.0); ORDER];
        let n = ORDER as f64;
        for (i, slot) in out.iter_mut().enumerate() {
            // Newton iteration on P_n from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=ORDER {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// ln ∫_a^b exp(g(s)) ds over `panels` equal panels, with a max-shift so
/// that large or tiny exponents neither overflow nor underflow.
pub(crate) fn ln_integral_exp<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, panels: usize) -> f64 {
    if !(b > a) {
        return f64::NEG_INFINITY;
    }
    let h = (b - a) / panels as f64;
    let nodes = nodes();
    let mut vals = Vec::with_capacity(panels * ORDER);
    let mut peak = f64::NEG_INFINITY;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in nodes {
            let v = g(mid + 0.5 * h * x);
            peak = peak.max(v);
            vals.push((v, w));
        }
    }
    if !peak.is_finite() {
        return peak;
    }
    let sum: f64 = vals.iter().map(|&(v, w)| w * (v - peak).exp()).sum();
    peak + (0.5 * h * sum).ln()
}
