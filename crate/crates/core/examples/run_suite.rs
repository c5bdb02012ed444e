//! The `verify` driver on a small grid, written to a directory.
//!
//! `cargo run --example run_suite -- out-dir`

use bhlab::harness::{run_verify, write_result, RunConfig};

fn main() -> bhlab::Result<()> {
    let cfg = RunConfig::from_json(
        r#"{
            "cutoff": {"policy": "fixed", "values": [4]},
            "grid": {"N": [2, 3], "U": [1.0], "mu": [0.0, 1.0], "lambda": [0.2], "beta": [1.0]},
            "checks": {"relative_samples": 20, "band_cutoffs": [4, 6, 8]}
        }"#,
    )?;
    let out = std::env::args().nth(1).unwrap_or_else(|| "suite-out".into());
    let result = run_verify(&cfg)?;
    for c in &result.checks {
        println!("{:<24} {:<12} rows {:4} worst slack {:?}", c.name, c.status.as_str(), c.count, c.worst_slack);
    }
    let files = write_result(&result, &cfg, out.as_ref())?;
    println!("wrote {} files to {out}", files.len());
    Ok(())
}
