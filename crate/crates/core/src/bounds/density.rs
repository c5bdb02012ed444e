//! Single-site series `g(r)`, the band it puts around `R_{Λ,λ}(μ)`, and the
//! window `[ρ₁, ρ₂]` for the density at small `λ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::ModelSpec;
use crate::thermal::{log_trace_at, Equilibrium};

/// Relative size of the last retained term.
pub const SERIES_TOL: f64 = 1e-16;

/// `g(r) = β^{-1} log Σ_{n≥0} e^{−β(Un² − rn)}` and `g′(r)`, the mean
/// occupation under the same weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GSeries {
    pub u: f64,
    pub beta: f64,
    pub r: f64,
    pub value: f64,
    pub derivative: f64,
    /// Largest `n` included.
    pub terms: usize,
}

fn check_ub(u: f64, beta: f64) -> Result<()> {
    if !(u > 0.0 && beta > 0.0 && u.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("need U > 0 and beta > 0 (got {u}, {beta})")));
    }
    Ok(())
}

/// Log-sum-exp evaluation truncated past the peak once a term drops below
/// [`SERIES_TOL`] of the partial sum.
pub fn g_series(u: f64, beta: f64, r: f64) -> Result<GSeries> {
    check_ub(u, beta)?;
    let exponent = |n: f64| -beta * (u * n * n - r * n);
    let peak = (r / (2.0 * u)).round().max(0.0);
    let top = exponent(peak);
    // the peak term is exactly 1; summing the rest separately keeps
    // log1p accurate far to the left
    let (mut rest, mut first) = (0.0f64, 0.0f64);
    let mut n = 0usize;
    loop {
        let w = (exponent(n as f64) - top).exp();
        if n as f64 != peak {
            rest += w;
        }
        first += n as f64 * w;
        if n as f64 > peak && w < SERIES_TOL * (1.0 + rest) {
            break;
        }
        n += 1;
    }
    Ok(GSeries {
        u,
        beta,
        r,
        value: (top + rest.ln_1p()) / beta,
        derivative: first / (1.0 + rest),
        terms: n,
    })
}

/// `g` with the sum cut at `n ≤ cutoff`.
pub fn g_truncated(u: f64, beta: f64, r: f64, cutoff: usize) -> Result<f64> {
    check_ub(u, beta)?;
    let exponent = |n: f64| -beta * (u * n * n - r * n);
    let top = (0..=cutoff).map(|n| exponent(n as f64)).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = (0..=cutoff).map(|n| (exponent(n as f64) - top).exp()).sum();
    Ok((top + sum.ln()) / beta)
}

pub fn g(u: f64, beta: f64, r: f64) -> f64 {
    g_series(u, beta, r).expect("validated parameters").value
}

fn g_prime(u: f64, beta: f64, r: f64) -> f64 {
    g_series(u, beta, r).expect("validated parameters").derivative
}

/// Three-valued outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

/// Gate on `|Δ log f_M|` for the lower band inequality.
pub const BAND_CONVERGENCE_TOL: f64 = 1e-8;
const BAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub mu: f64,
    pub cutoff: usize,
    pub log_f: f64,
    /// `R = log f_M / (β|Λ|)`.
    pub r_value: f64,
    /// `−|λ| + g(μ − 𝕄 − |λ|)`.
    pub lower: f64,
    /// `|λ| + g(μ + 𝕄 + |λ|)`.
    pub upper: f64,
    /// `|log f_M − log f_{M_prev}|`, absent at the first cutoff.
    pub increment: Option<f64>,
    pub upper_status: CheckStatus,
    pub lower_status: CheckStatus,
}

/// Evaluate the band at each `μ` and each cutoff of an ascending list.
pub fn density_band_check(
    model: &ModelSpec,
    cutoffs: &[usize],
    mus: &[f64],
    cap: usize,
) -> Result<Vec<BandRow>> {
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("cutoffs must be non-empty and ascending".into()));
    }
    let (u, beta) = (model.u, model.beta);
    let lam = model.lambda.abs();
    let mm = model.hopping.row_sum_bound();
    let mut rows = Vec::new();
    for &mu in mus {
        let lower = -lam + g(u, beta, mu - mm - lam);
        let upper = lam + g(u, beta, mu + mm + lam);
        let mut prev: Option<f64> = None;
        for &m in cutoffs {
            let log_f = log_trace_at(&model.with_mu(mu), m, cap)?;
            let r_value = log_f / (beta * model.sites() as f64);
            let increment = prev.map(|p| (log_f - p).abs());
            let lower_status = match increment {
                Some(d) if d < BAND_CONVERGENCE_TOL => CheckStatus::from_bool(lower <= r_value + BAND_TOL),
                _ => CheckStatus::Inconclusive,
            };
            rows.push(BandRow {
                mu,
                cutoff: m,
                log_f,
                r_value,
                lower,
                upper,
                increment,
                upper_status: CheckStatus::from_bool(r_value <= upper + BAND_TOL),
                lower_status,
            });
            prev = Some(log_f);
        }
    }
    Ok(rows)
}

/// Constructive `(λ₀, ρ₁, ρ₂)` for a fixed `μ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityWindow {
    pub u: f64,
    pub beta: f64,
    /// `𝕄`.
    pub hopping_bound: f64,
    pub mu0: f64,
    /// `C = lim_{r→−∞} g(r)`.
    pub c: f64,
    /// `g(μ₀ − 𝕄)`.
    pub p1: f64,
    /// `g(μ₀ + 𝕄)`.
    pub p2: f64,
    /// `(P₁ − C)/(2 + g′(μ₀ − 𝕄))`, the strict upper limit for `λ₀`.
    pub lambda_limit: f64,
    pub lambda0: f64,
    /// `g(μ₀ − 𝕄 − λ₀) − λ₀`.
    pub q1: f64,
    pub mu_tilde: f64,
    /// `G₀(μ̃) = g(μ̃ + 𝕄 + λ₀) + λ₀`.
    pub g0_mu_tilde: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub halvings: usize,
}

const SEARCH_STEP: f64 = 1.0;
const SEARCH_STEPS: usize = 200;
const MAX_HALVINGS: usize = 40;

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

pub fn density_window(u: f64, beta: f64, hopping_bound: f64, mu0: f64) -> Result<DensityWindow> {
    check_ub(u, beta)?;
    if !(hopping_bound >= 0.0 && mu0.is_finite()) {
        return Err(Error::InvalidParameter("need M >= 0 and finite mu0".into()));
    }
    let gg = |r: f64| g(u, beta, r);
    let c = 0.0;
    let p1 = gg(mu0 - hopping_bound);
    let p2 = gg(mu0 + hopping_bound);
    let lambda_limit = (p1 - c) / (2.0 + g_prime(u, beta, mu0 - hopping_bound));
    let mut lambda0 = 0.5 * lambda_limit;

    for halvings in 0..=MAX_HALVINGS {
        let q1 = gg(mu0 - hopping_bound - lambda0) - lambda0;
        let g0 = |mu: f64| gg(mu + hopping_bound + lambda0) + lambda0;
        let found = (1..=SEARCH_STEPS)
            .map(|j| mu0 - SEARCH_STEP * j as f64)
            .find(|&mu| g0(mu) < q1);
        if let Some(start) = found {
            let rho = |mu: f64| (q1 - g0(mu)) / (mu0 - mu);
            let upper = (start + SEARCH_STEP).min(mu0 - 1e-9);
            let refined = golden_max(rho, start - 50.0 * SEARCH_STEP, upper);
            let mu_tilde = if rho(refined) > rho(start) { refined } else { start };
            let rho1 = rho(mu_tilde);
            let rho2 = g0(mu0 + 1.0) - q1;
            if rho1 > 0.0 && rho2 > rho1 {
                return Ok(DensityWindow {
                    u,
                    beta,
                    hopping_bound,
                    mu0,
                    c,
                    p1,
                    p2,
                    lambda_limit,
                    lambda0,
                    q1,
                    mu_tilde,
                    g0_mu_tilde: g0(mu_tilde),
                    rho1,
                    rho2,
                    halvings,
                });
            }
        }
        lambda0 *= 0.5;
    }
    Err(Error::Domain(format!(
        "no window found for mu0 = {mu0} after {MAX_HALVINGS} halvings of lambda0"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSample {
    pub lambda: f64,
    pub density: f64,
    pub pass: bool,
}

pub const WINDOW_TOL: f64 = 1e-9;

/// `ρ_M(λ)` at `μ₀` for each sampled `λ`, checked against `[ρ₁, ρ₂]`.
pub fn window_empirical_check(
    window: &DensityWindow,
    model: &ModelSpec,
    cutoff: usize,
    lambdas: &[f64],
) -> Result<Vec<WindowSample>> {
    if (model.hopping.row_sum_bound() - window.hopping_bound).abs() > 1e-12 {
        return Err(Error::InvalidParameter("model hopping does not match the window's M".into()));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            if lambda.abs() >= window.lambda0 {
                return Err(Error::Domain(format!("|lambda| = {lambda} not below lambda0")));
            }
            let m = model.with_mu(window.mu0).with_lambda(lambda).with_u(window.u).with_beta(window.beta);
            let density = Equilibrium::solve(&m, cutoff)?.density();
            Ok(WindowSample {
                lambda,
                density,
                pass: density >= window.rho1 - WINDOW_TOL && density <= window.rho2 + WINDOW_TOL,
            })
        })
        .collect()
}
