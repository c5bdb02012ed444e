//! Order-parameter bound along a short scan in the symmetry-breaking field.

use bhlab::bounds::{bound_monotone_in_lambda, condensation_scan, write_scan_csv, CutoffPolicy, ScanSpec};

fn main() -> bhlab::Result<()> {
    let spec = ScanSpec {
        lattices: vec![(1, 2), (1, 3), (2, 2)],
        lambdas: vec![0.5, 0.2, 0.1, 0.05],
        u: 1.0,
        mu: 0.0,
        beta: 1.0,
        hopping: -0.5,
        policy: CutoffPolicy { cap: 2500, ..CutoffPolicy::default() },
    };
    let rows = condensation_scan(&spec)?;
    write_scan_csv(&rows, std::io::stdout())?;
    for ((d, n), ok) in bound_monotone_in_lambda(&rows) {
        println!("d = {d}, N = {n}: bound decreases with lambda: {ok}");
    }
    Ok(())
}
