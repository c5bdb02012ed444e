use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::{CutoffConfig, RunConfig};
use super::report::{fmt, fmt_k, CheckResult, Status, SuiteResult, Table};
use crate::bogolyubov::{
    verify_chain_inequality, verify_finite_bogolyubov, verify_l_average_bound,
    verify_projection_identities, CLOSED_FORM_TOL, IDENTITY_TOL,
};
use crate::bounds::{density_band_check, ground_energy_check, relative_bound_checks, sector_norm_checks, CheckStatus};
use crate::error::Result;
use crate::fock::{truncated_dim, TruncatedBasis};
use crate::operators::{ModelSpec, SparseOperator};
use crate::thermal::Equilibrium;

const THERMAL: usize = 0;
const PROJECTION: usize = 1;
const CLOSED_FORMS: usize = 2;
const BOGOLYUBOV: usize = 3;
const CHAIN: usize = 4;
const L_BOUND: usize = 5;
const GROUND: usize = 6;
const SECTOR_NORMS: usize = 7;
const RELATIVE: usize = 8;
const BAND: usize = 9;

const POINT: &[&str] = &["d", "N", "M", "U", "mu", "lambda", "beta"];

fn families() -> Vec<Table> {
    let with_point = |name: &str, rest: &[&str]| {
        let cols: Vec<&str> = POINT.iter().chain(rest).copied().collect();
        Table::new(name, &cols)
    };
    vec![
        with_point(
            "thermal",
            &["identity_average", "partition", "density", "order_parameter", "max_residual", "status"],
        ),
        with_point(
            "projection_identities",
            &["k", "commutator_delta", "double_commutator_delta", "anticommutator_delta", "correction_min_eigenvalue", "status"],
        ),
        with_point("closed_forms", &["k", "c_a", "c_l", "c_l_cdag", "c_t", "c_t_cdag", "c_h_cdag", "status"]),
        with_point(
            "bogolyubov",
            &["k", "occupation", "double_commutator", "double_commutator_closed", "lhs", "lhs_corrected", "rhs", "slack", "tolerance", "status"],
        ),
        with_point(
            "chain_inequality",
            &["k", "k_squared", "double_commutator", "denominator", "lhs", "rhs", "slack", "status"],
        ),
        with_point("l_bound", &["l_abs", "n_average", "slack", "status"]),
        with_point("ground_energy", &["K", "threshold", "bound", "lambda_min", "slack", "status"]),
        Table::new(
            "sector_norms",
            &["d", "N", "M", "m", "pair_norm_exact", "pair_norm_delta", "t_prime_norm", "t_prime_bound", "n2_min", "n2_bound", "status"],
        ),
        Table::new(
            "relative_bounds",
            &["d", "N", "M", "K", "samples", "seed", "violations_t_prime", "violations_n", "violations_t_second", "violations_l", "worst_t_prime", "worst_n", "worst_t_second", "worst_l", "status"],
        ),
        Table::new(
            "density_band",
            &["d", "N", "U", "lambda", "beta", "mu", "M", "R", "lower", "upper", "increment", "upper_status", "lower_status", "status"],
        ),
    ]
}

/// Rows produced by one job, tagged with their family.
#[derive(Default)]
struct Outcome {
    rows: Vec<(usize, Vec<String>, Status, Option<f64>)>,
    times: Vec<(usize, Duration)>,
}

impl Outcome {
    fn push(&mut self, family: usize, mut row: Vec<String>, status: Status, slack: Option<f64>) {
        row.push(status.as_str().into());
        self.rows.push((family, row, status, slack));
    }

    fn timed<T>(&mut self, family: usize, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.times.push((family, t.elapsed()));
        out
    }
}

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn point_cols(model: &ModelSpec, cutoff: usize) -> Vec<String> {
    vec![
        model.lattice.dimension().to_string(),
        model.lattice.size().to_string(),
        cutoff.to_string(),
        fmt(model.u),
        fmt(model.mu),
        fmt(model.lambda),
        fmt(model.beta),
    ]
}

fn with(mut base: Vec<String>, rest: impl IntoIterator<Item = String>) -> Vec<String> {
    base.extend(rest);
    base
}

/// Cutoffs to check at one parameter point.
pub fn resolve_cutoffs(model: &ModelSpec, cfg: &RunConfig) -> Result<Vec<usize>> {
    match &cfg.cutoff {
        CutoffConfig::Fixed { values } => Ok(values.clone()),
        CutoffConfig::Adaptive { start, max, tolerance } => {
            let sites = model.sites();
            let mut m = *start;
            let mut prev: Option<(f64, f64)> = None;
            let mut last = *start;
            // the +2 buffer of the projection identities must also fit
            while m <= *max && truncated_dim(sites, m + 2) <= cfg.cap as u128 {
                let eq = Equilibrium::solve_with_cap(model, m, cfg.cap)?;
                let now = (eq.density(), eq.order_parameter());
                last = m;
                if let Some(p) = prev {
                    if (now.0 - p.0).abs() < *tolerance && (now.1 - p.1).abs() < *tolerance {
                        break;
                    }
                }
                prev = Some(now);
                m += 1;
            }
            Ok(vec![last])
        }
    }
}

struct Point {
    model: ModelSpec,
    /// First `β` of the grid; `β`-independent checks run only here.
    first_beta: bool,
}

fn point_job(p: &Point, cfg: &RunConfig) -> Result<(Vec<usize>, Outcome)> {
    let model = &p.model;
    let mut out = Outcome::default();
    let cutoffs = resolve_cutoffs(model, cfg)?;
    let momenta = model.lattice.brillouin_momenta();
    for &cutoff in &cutoffs {
        let pc = point_cols(model, cutoff);
        let eq = out.timed(THERMAL, || Equilibrium::solve_with_cap(model, cutoff, cfg.cap))?;

        let (row, pass) = out.timed(THERMAL, || -> Result<(Vec<String>, bool)> {
            let one = eq.average(&SparseOperator::identity(eq.basis.dim()))?.re;
            let residual = eq.spectrum.max_residual(&eq.hamiltonian)?;
            let scale = eq.hamiltonian.max_abs().max(1.0);
            let (rho, m) = (eq.density(), eq.order_parameter());
            let pass = (one - 1.0).abs() <= IDENTITY_TOL
                && eq.state.partition >= 1.0
                && rho >= 0.0
                && m >= 0.0
                && residual <= 1e-9 * scale;
            Ok((with(pc.clone(), [fmt(one), fmt(eq.state.partition), fmt(rho), fmt(m), fmt(residual)]), pass))
        })?;
        out.push(THERMAL, row, status(pass), None);

        if p.first_beta {
            for k in &momenta {
                let r = out.timed(PROJECTION, || verify_projection_identities(model, cutoff, k, cfg.cap))?;
                let worst = r.commutator_delta.max(r.double_commutator_delta).max(r.anticommutator_delta);
                out.push(
                    PROJECTION,
                    with(
                        pc.clone(),
                        [
                            fmt_k(&r.k),
                            fmt(r.commutator_delta),
                            fmt(r.double_commutator_delta),
                            fmt(r.anticommutator_delta),
                            fmt(r.correction_min_eigenvalue),
                        ],
                    ),
                    status(r.pass),
                    Some(IDENTITY_TOL - worst),
                );
            }
        }

        for k in &momenta {
            let r = out.timed(BOGOLYUBOV, || verify_finite_bogolyubov(&eq, k))?;
            if p.first_beta {
                let cf = &r.closed_form;
                let worst = cf.max();
                out.push(
                    CLOSED_FORMS,
                    with(
                        pc.clone(),
                        [fmt_k(&r.k), fmt(cf.c_a), fmt(cf.c_l), fmt(cf.c_l_cdag), fmt(cf.c_t), fmt(cf.c_t_cdag), fmt(cf.c_h_cdag)],
                    ),
                    status(worst <= CLOSED_FORM_TOL),
                    Some(CLOSED_FORM_TOL - worst),
                );
            }
            out.push(
                BOGOLYUBOV,
                with(
                    pc.clone(),
                    [
                        fmt_k(&r.k),
                        fmt(r.occupation),
                        fmt(r.double_commutator),
                        fmt(r.double_commutator_closed),
                        fmt(r.lhs),
                        fmt(r.lhs_corrected),
                        fmt(r.rhs),
                        fmt(r.slack),
                        fmt(r.tolerance),
                    ],
                ),
                status(r.pass),
                Some(r.slack),
            );
        }

        if model.lambda == 0.0 {
            let blank = || String::new();
            out.push(
                CHAIN,
                with(pc.clone(), ["sum".into(), blank(), blank(), blank(), blank(), blank(), blank()]),
                Status::Skipped,
                None,
            );
        } else {
            let r = out.timed(CHAIN, || verify_chain_inequality(&eq))?;
            for t in &r.terms {
                out.push(
                    CHAIN,
                    with(
                        pc.clone(),
                        [
                            fmt_k(&t.k),
                            fmt(t.k_squared),
                            fmt(t.double_commutator),
                            fmt(t.denominator),
                            fmt(t.lhs),
                            fmt(t.rhs),
                            fmt(t.rhs - t.lhs),
                        ],
                    ),
                    status(t.pass && t.intermediate_pass),
                    Some(t.rhs - t.lhs),
                );
            }
            let slack = r.summed_rhs - r.summed_lhs;
            out.push(
                CHAIN,
                with(
                    pc.clone(),
                    ["sum".into(), String::new(), String::new(), String::new(), fmt(r.summed_lhs), fmt(r.summed_rhs), fmt(slack)],
                ),
                status(r.pass),
                Some(slack),
            );
        }

        let r = out.timed(L_BOUND, || verify_l_average_bound(&eq))?;
        out.push(
            L_BOUND,
            with(pc.clone(), [fmt(r.l_average.norm()), fmt(r.n_average), fmt(r.slack)]),
            status(r.pass),
            Some(r.slack),
        );

        if p.first_beta {
            let r = out.timed(GROUND, || ground_energy_check(model, cutoff, eq.spectrum.ground_energy()))?;
            for e in &r.entries {
                out.push(
                    GROUND,
                    with(pc.clone(), [e.k.to_string(), fmt(r.threshold), fmt(e.bound), fmt(e.lambda_min), fmt(e.slack)]),
                    status(e.pass),
                    Some(e.slack),
                );
            }
        }
    }
    Ok((cutoffs, out))
}

fn norms_job(model: &ModelSpec, cutoff: usize, cfg: &RunConfig, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let basis = TruncatedBasis::with_cap(model.sites(), cutoff, cfg.cap)?;
    let (d, n) = (model.lattice.dimension().to_string(), model.lattice.size().to_string());
    for m in 0..=cutoff {
        let r = out.timed(SECTOR_NORMS, || sector_norm_checks(&basis, model, m))?;
        out.push(
            SECTOR_NORMS,
            vec![
                d.clone(),
                n.clone(),
                cutoff.to_string(),
                m.to_string(),
                fmt(r.pair_norm_exact),
                fmt(r.pair_norm_delta),
                fmt(r.t_prime_norm),
                fmt(r.t_prime_bound),
                fmt(r.n2_min),
                fmt(r.n2_bound),
            ],
            status(r.pass),
            Some((r.t_prime_bound - r.t_prime_norm).min(r.n2_min - r.n2_bound)),
        );
    }
    for (i, &k) in cfg.checks.relative_k.iter().enumerate() {
        let s = seed.wrapping_add(i as u64);
        let r = out.timed(RELATIVE, || relative_bound_checks(&basis, model, k, cfg.checks.relative_samples, s))?;
        let worst = r.worst_slack.iter().copied().fold(f64::INFINITY, f64::min);
        let mut row = vec![d.clone(), n.clone(), cutoff.to_string(), k.to_string(), r.samples.to_string(), s.to_string()];
        row.extend(r.violations.iter().map(usize::to_string));
        row.extend(r.worst_slack.iter().map(|&x| fmt(x)));
        out.push(RELATIVE, row, status(r.pass), Some(worst));
    }
    Ok(out)
}

fn band_job(model: &ModelSpec, cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let rows = out.timed(BAND, || density_band_check(model, &cfg.checks.band_cutoffs, &cfg.grid.mu, cfg.cap))?;
    for r in rows {
        let combined = match (r.upper_status, r.lower_status) {
            (CheckStatus::Fail, _) | (_, CheckStatus::Fail) => Status::Fail,
            (CheckStatus::Pass, CheckStatus::Pass) => Status::Pass,
            _ => Status::Inconclusive,
        };
        let slack = match r.lower_status {
            CheckStatus::Inconclusive => r.upper - r.r_value,
            _ => (r.upper - r.r_value).min(r.r_value - r.lower),
        };
        out.push(
            BAND,
            vec![
                model.lattice.dimension().to_string(),
                model.lattice.size().to_string(),
                fmt(model.u),
                fmt(model.lambda),
                fmt(model.beta),
                fmt(r.mu),
                r.cutoff.to_string(),
                fmt(r.r_value),
                fmt(r.lower),
                fmt(r.upper),
                r.increment.map_or_else(String::new, fmt),
                r.upper_status.as_str().into(),
                r.lower_status.as_str().into(),
            ],
            combined,
            Some(slack),
        );
    }
    Ok(out)
}

/// Run `f` on a pool of `jobs` threads (0: rayon's default).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// The full invariant suite over the configured grid. Rows are assembled in
/// grid order regardless of `jobs`.
pub fn run_verify(cfg: &RunConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let g = &cfg.grid;
    let mut points = Vec::new();
    for &n in &g.sizes {
        for &u in &g.u {
            for &mu in &g.mu {
                for &lambda in &g.lambda {
                    for (bi, &beta) in g.beta.iter().enumerate() {
                        points.push(Point {
                            model: cfg.model.model(n, u, mu, lambda, beta)?,
                            first_beta: bi == 0,
                        });
                    }
                }
            }
        }
    }
    let mut band_models = Vec::new();
    for &n in &g.sizes {
        for &u in &g.u {
            for &lambda in &g.lambda {
                for &beta in &g.beta {
                    band_models.push(cfg.model.model(n, u, cfg.model.mu, lambda, beta)?);
                }
            }
        }
    }

    with_pool(cfg.jobs, || -> Result<SuiteResult> {
        let point_results: Vec<Result<(Vec<usize>, Outcome)>> =
            points.par_iter().map(|p| point_job(p, cfg)).collect();
        let mut outcomes = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (p, r) in points.iter().zip(point_results) {
            let (cutoffs, o) = r?;
            pairs.extend(cutoffs.into_iter().map(|m| (p.model.lattice.size(), m)));
            outcomes.push(o);
        }
        pairs.sort_unstable();
        pairs.dedup();
        let norm_results: Vec<Result<Outcome>> = pairs
            .par_iter()
            .enumerate()
            .map(|(i, &(n, m))| {
                let model = cfg.model.model(n, cfg.model.u, cfg.model.mu, cfg.model.lambda, cfg.model.beta)?;
                norms_job(&model, m, cfg, cfg.seed.wrapping_add(1000 * i as u64))
            })
            .collect();
        let band_results: Vec<Result<Outcome>> = band_models.par_iter().map(|m| band_job(m, cfg)).collect();
        for r in norm_results.into_iter().chain(band_results) {
            outcomes.push(r?);
        }

        let mut tables = families();
        let mut checks: Vec<CheckResult> = tables.iter().map(|t| CheckResult::new(&t.name)).collect();
        for o in outcomes {
            for (fam, row, st, slack) in o.rows {
                tables[fam].push(row);
                if st != Status::Skipped {
                    checks[fam].record(st, slack);
                }
            }
            for (fam, t) in o.times {
                checks[fam].add_time(t);
            }
        }
        Ok(SuiteResult {
            command: "verify".into(),
            checks,
            tables,
        })
    })?
}
