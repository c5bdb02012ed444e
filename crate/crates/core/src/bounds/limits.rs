//! Brillouin-zone sums against their integrals, and the scan of the
//! order-parameter bound over `(d, N, λ)`.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::truncated_dim;
use crate::lattice::LatticeSpec;
use crate::operators::{HoppingSpec, ModelSpec};
use crate::thermal::Equilibrium;

fn check_alpha(alpha: f64, m2: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 0 (got {alpha})")));
    }
    if !(m2 >= 0.0 && m2.is_finite()) {
        return Err(Error::Domain(format!("M2 must be >= 0 (got {m2})")));
    }
    Ok(())
}

/// `S_N = (2π/N)^d Σ_{k∈Λ̂} [𝕄₂|k|² + α]^{-1}` with `k_i ∈ [0, 2π)`.
pub fn ksum(dimension: usize, size: usize, m2: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, m2)?;
    let lattice = LatticeSpec::new(dimension, size)?;
    let cell = (2.0 * PI / size as f64).powi(dimension as i32);
    let sum: f64 = lattice
        .brillouin_momenta()
        .iter()
        .map(|k| 1.0 / (m2 * k.norm_squared() + alpha))
        .sum();
    Ok(cell * sum)
}

/// `∫_0^{2π} dx / (𝕄₂x² + c)`.
fn line_integral(m2: f64, c: f64) -> f64 {
    if m2 == 0.0 {
        2.0 * PI / c
    } else {
        (2.0 * PI * (m2 / c).sqrt()).atan() / (m2 * c).sqrt()
    }
}

/// d = 1 limit `(𝕄₂α)^{-1/2} arctan(2π√(𝕄₂/α))`.
pub fn ksum_limit_1d(m2: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, m2)?;
    Ok(line_integral(m2, alpha))
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// d = 2 limit `∫_{[0,2π]²} dk / (𝕄₂|k|² + α)`: inner integral in closed
/// form, outer by adaptive Simpson.
pub fn ksum_limit_2d(m2: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, m2)?;
    if m2 == 0.0 {
        return Ok(4.0 * PI * PI / alpha);
    }
    let f = |x: f64| line_integral(m2, m2 * x * x + alpha);
    let (a, b) = (0.0, 2.0 * PI);
    let (fa, fm, fb) = (f(a), f(PI), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Ok(simpson(&f, a, b, fa, fm, fb, whole, 1e-13, 50))
}

/// Quarter-disc lower bound `(π/(4𝕄₂)) log(1 + 4𝕄₂π²/α)`.
pub fn ksum_lower_bound_2d(m2: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, m2)?;
    if m2 == 0.0 {
        return Ok(PI * PI * PI / alpha);
    }
    Ok(PI / (4.0 * m2) * (1.0 + 4.0 * m2 * PI * PI / alpha).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsumRow {
    pub dimension: usize,
    pub size: usize,
    pub m2: f64,
    pub alpha: f64,
    pub sum: f64,
    pub limit: f64,
    pub error: f64,
    /// Previous row's error over this one's.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsumTable {
    pub rows: Vec<KsumRow>,
    pub limit: f64,
    /// Quarter-disc bound (d = 2 only).
    pub lower_bound: Option<f64>,
}

pub fn ksum_vs_integral(dimension: usize, sizes: &[usize], m2: f64, alpha: f64) -> Result<KsumTable> {
    let (limit, lower_bound) = match dimension {
        1 => (ksum_limit_1d(m2, alpha)?, None),
        2 => (ksum_limit_2d(m2, alpha)?, Some(ksum_lower_bound_2d(m2, alpha)?)),
        _ => return Err(Error::Domain(format!("k-sum limits are for d = 1, 2 (got {dimension})"))),
    };
    let mut rows: Vec<KsumRow> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let sum = ksum(dimension, n, m2, alpha)?;
        let error = (sum - limit).abs();
        let ratio = rows.last().map(|p| p.error / error);
        rows.push(KsumRow {
            dimension,
            size: n,
            m2,
            alpha,
            sum,
            limit,
            error,
            ratio,
        });
    }
    Ok(KsumTable {
        rows,
        limit,
        lower_bound,
    })
}

/// Outcome of one scan point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanStatus {
    /// Bound holds; `ρ_M`, `m_M` converged.
    Converged,
    /// Bound holds; the cutoff hit the cap before convergence.
    Unconverged,
    /// Bound violated.
    Fail,
    /// `λ = 0` rows carry no bound.
    Excluded,
    /// Not even the first cutoff fits under the cap.
    Skipped,
}

impl ScanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::Unconverged => "unconverged",
            Self::Fail => "fail",
            Self::Excluded => "excluded",
            Self::Skipped => "skipped",
        }
    }

    pub fn is_failure(self) -> bool {
        self == Self::Fail
    }
}

/// Increase `M` from `start` until `ρ_M` and `m_M` both move less than
/// `tolerance`, or the next basis would exceed `cap`, or `M > max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffPolicy {
    pub start: usize,
    pub max: usize,
    pub tolerance: f64,
    pub cap: usize,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            start: 2,
            max: 40,
            tolerance: 1e-6,
            cap: 6000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M_final")]
    pub m_final: usize,
    #[serde(rename = "U")]
    pub u: f64,
    pub mu: f64,
    pub lambda: f64,
    pub beta: f64,
    pub rho: f64,
    pub m: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub bound: f64,
    pub slack: f64,
    pub status: ScanStatus,
}

/// Scan request: lattices `(d, N)`, fields `λ`, and the fixed model
/// parameters with nearest-neighbour hopping `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    pub lattices: Vec<(usize, usize)>,
    pub lambdas: Vec<f64>,
    pub u: f64,
    pub mu: f64,
    pub beta: f64,
    pub hopping: f64,
    pub policy: CutoffPolicy,
}

/// `(2π)^d βρ(ρ+½) / S` with `S` at `α = |λ|(1 + 1/ρ)`.
pub fn order_parameter_bound(dimension: usize, size: usize, m2: f64, lambda: f64, beta: f64, rho: f64) -> Result<(f64, f64)> {
    let alpha = lambda.abs() * (1.0 + 1.0 / rho);
    let s = ksum(dimension, size, m2, alpha)?;
    let bound = (2.0 * PI).powi(dimension as i32) * beta * rho * (rho + 0.5) / s;
    Ok((s, bound))
}

/// One scan point.
pub fn scan_point(d: usize, n: usize, lambda: f64, spec: &ScanSpec) -> Result<ScanRow> {
    let lattice = LatticeSpec::new(d, n)?;
    let model = ModelSpec::new(
        HoppingSpec::nearest_neighbour(lattice, spec.hopping),
        spec.u,
        spec.mu,
        lambda,
        spec.beta,
    )?;
    let sites = lattice.site_count();
    let policy = &spec.policy;
    let mut row = ScanRow {
        d,
        n,
        m_final: 0,
        u: spec.u,
        mu: spec.mu,
        lambda,
        beta: spec.beta,
        rho: f64::NAN,
        m: f64::NAN,
        s: f64::NAN,
        bound: f64::NAN,
        slack: f64::NAN,
        status: ScanStatus::Skipped,
    };
    if lambda == 0.0 {
        row.status = ScanStatus::Excluded;
        return Ok(row);
    }
    let mut prev: Option<(f64, f64)> = None;
    let mut converged = false;
    let mut cutoff = policy.start;
    while cutoff <= policy.max && truncated_dim(sites, cutoff) <= policy.cap as u128 {
        let eq = Equilibrium::solve_with_cap(&model, cutoff, policy.cap)?;
        let (rho, m) = (eq.density(), eq.order_parameter());
        row.m_final = cutoff;
        row.rho = rho;
        row.m = m;
        if let Some((pr, pm)) = prev {
            if (rho - pr).abs() < policy.tolerance && (m - pm).abs() < policy.tolerance {
                converged = true;
                break;
            }
        }
        prev = Some((rho, m));
        cutoff += 1;
    }
    if prev.is_none() && !converged {
        return Ok(row);
    }
    let m2 = model.hopping.second_moment();
    let (s, bound) = order_parameter_bound(d, n, m2, lambda, spec.beta, row.rho)?;
    row.s = s;
    row.bound = bound;
    row.slack = bound - row.m;
    let rhs = (2.0 * PI).powi(d as i32) * spec.beta * row.rho * (row.rho + 0.5) * (1.0 + 1e-9);
    row.status = if row.m * s > rhs {
        ScanStatus::Fail
    } else if converged {
        ScanStatus::Converged
    } else {
        ScanStatus::Unconverged
    };
    Ok(row)
}

/// Points in grid order: lattices outer, `λ` inner.
pub fn scan_points(spec: &ScanSpec) -> Vec<(usize, usize, f64)> {
    spec.lattices
        .iter()
        .flat_map(|&(d, n)| spec.lambdas.iter().map(move |&l| (d, n, l)))
        .collect()
}

/// Sequential scan in grid order.
pub fn condensation_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    scan_points(spec)
        .into_iter()
        .map(|(d, n, l)| scan_point(d, n, l, spec))
        .collect()
}

/// For each `(d, N)`, whether the bound decreases as `|λ|` decreases over
/// the rows that carry a bound.
pub fn bound_monotone_in_lambda(rows: &[ScanRow]) -> Vec<((usize, usize), bool)> {
    let mut keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.d, r.n)).collect();
    keys.dedup();
    keys.into_iter()
        .map(|key| {
            let mut pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| (r.d, r.n) == key && r.bound.is_finite())
                .map(|r| (r.lambda.abs(), r.bound))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (key, pts.windows(2).all(|w| w[0].1 < w[1].1))
        })
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with columns `d,N,M_final,U,mu,lambda,beta,rho,m,S,bound,slack,status`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["d", "N", "M_final", "U", "mu", "lambda", "beta", "rho", "m", "S", "bound", "slack", "status"])?;
    for r in rows {
        w.write_record([
            r.d.to_string(),
            r.n.to_string(),
            r.m_final.to_string(),
            fmt(r.u),
            fmt(r.mu),
            fmt(r.lambda),
            fmt(r.beta),
            fmt(r.rho),
            fmt(r.m),
            fmt(r.s),
            fmt(r.bound),
            fmt(r.slack),
            r.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_dispersion_is_exact() {
        for d in 1..=2 {
            for n in [2, 3, 5] {
                let s = ksum(d, n, 0.0, 0.7).unwrap();
                let exact = (2.0 * PI).powi(d as i32) / 0.7;
                assert!((s - exact).abs() <= 1e-12 * exact);
            }
        }
    }

    #[test]
    fn one_dimensional_first_order_convergence() {
        let t = ksum_vs_integral(1, &[8, 16, 32, 64], 1.0, 1.0).unwrap();
        assert!((t.limit - (2.0 * PI).atan()).abs() < 1e-15);
        for r in &t.rows[1..] {
            assert!(r.ratio.unwrap() >= 1.8, "{r:?}");
        }
    }

    #[test]
    fn two_dimensional_quadrature() {
        // separable check: with alpha large the integrand is nearly flat
        let flat = ksum_limit_2d(1e-12, 1.0).unwrap();
        assert!((flat - 4.0 * PI * PI).abs() < 1e-6);
        for alpha in [1.0, 0.1, 0.01] {
            let lim = ksum_limit_2d(1.0, alpha).unwrap();
            assert!(lim > ksum_lower_bound_2d(1.0, alpha).unwrap());
            // the Riemann sum approaches the quadrature value
            let s = ksum(2, 400, 1.0, alpha).unwrap();
            assert!((s - lim).abs() / lim < 0.05, "{s} {lim}");
        }
    }

    #[test]
    fn bad_alpha() {
        assert!(ksum(1, 4, 1.0, 0.0).is_err());
        assert!(ksum_vs_integral(3, &[4], 1.0, 1.0).is_err());
    }

    #[test]
    fn scan_small_chain() {
        let spec = ScanSpec {
            lattices: vec![(1, 2)],
            lambdas: vec![0.5, 0.1, 0.0],
            u: 1.0,
            mu: 0.0,
            beta: 1.0,
            hopping: -0.5,
            policy: CutoffPolicy {
                start: 2,
                max: 20,
                tolerance: 1e-6,
                cap: 1000,
            },
        };
        let rows = condensation_scan(&spec).unwrap();
        assert_eq!(rows[0].status, ScanStatus::Converged);
        assert_eq!(rows[2].status, ScanStatus::Excluded);
        assert!(rows[1].m > 0.0);
        assert!(rows[0].bound > rows[1].bound);
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("d,N,M_final,U,mu,lambda,beta,rho,m,S,bound,slack,status\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
