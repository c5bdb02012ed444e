//! JSON run configuration, the `verify` and `scan` drivers, and CSV/manifest
//! output for the `bhl` binary.
//!
//! Every driver returns a [`SuiteResult`]; [`SuiteResult::write`] puts one
//! CSV per table, `summary.csv` and `manifest.json` into the output
//! directory. Tables never carry timings, so repeated runs give identical
//! CSV bytes.

mod config;
mod report;
mod scan;
mod verify;

use std::path::Path;

pub use config::{
    ChecksConfig, CondensationConfig, ConvergenceScanConfig, CutoffConfig, DensityScanConfig,
    GridConfig, KsumScanConfig, ModelConfig, Overrides, RunConfig, ScansConfig, DEFAULT_HOPPING,
};
pub use report::{fmt, fmt_k, CheckResult, Status, SuiteResult, Table};
pub use scan::{condensation_spec, run_scan, ScanKind, SCAN_HEADER};
pub use verify::{resolve_cutoffs, run_verify, with_pool};

use crate::error::{Error, Result};
use crate::operators::hamiltonian;
use crate::fock::TruncatedBasis;
use crate::thermal::diagonalize_with_cap;

/// Process exit code for a configuration error.
pub const EXIT_CONFIG: i32 = 2;

/// Exit code for a failed run: configuration and parameter errors map to 2.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::InvalidLattice(_)
        | Error::NonHermitianHopping { .. }
        | Error::DimensionCap { .. }
        | Error::Json(_) => EXIT_CONFIG,
        _ => 1,
    }
}

/// Spectrum of the base model at `cutoff` (default: the first fixed cutoff,
/// or the adaptive start).
pub fn run_spectrum(cfg: &RunConfig, cutoff: Option<usize>) -> Result<SuiteResult> {
    cfg.validate()?;
    let m = cutoff.unwrap_or(match &cfg.cutoff {
        CutoffConfig::Fixed { values } => values[0],
        CutoffConfig::Adaptive { start, .. } => *start,
    });
    let model = cfg.model.base_model()?;
    let basis = TruncatedBasis::with_cap(model.sites(), m, cfg.cap)?;
    let h = hamiltonian(&model, &basis)?;
    let spec = diagonalize_with_cap(&h, cfg.cap)?;
    let mut t = Table::new("spectrum", &["index", "eigenvalue"]);
    for (i, e) in spec.eigenvalues().iter().enumerate() {
        t.push(vec![i.to_string(), fmt(*e)]);
    }
    let residual = spec.max_residual(&h)?;
    let mut c = CheckResult::new("eigen_residual");
    c.pass_fail(residual <= 1e-9 * h.max_abs().max(1.0), None);
    Ok(SuiteResult {
        command: format!("spectrum M={m}"),
        checks: vec![c],
        tables: vec![t],
    })
}

/// Write `result` into `dir` with the config hash in the manifest.
pub fn write_result(result: &SuiteResult, cfg: &RunConfig, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    result.write(dir, &cfg.hash(), &serde_json::to_string(cfg)?)
}
