//! Single-site series `g`, the density band and the constructive window.

use bhlab::bounds::{density_band_check, density_window, g, window_empirical_check};
use bhlab::operators::{HoppingSpec, ModelSpec};
use bhlab::LatticeSpec;

fn main() -> bhlab::Result<()> {
    for r in [-2.0, 0.0, 2.0] {
        println!("g({r}) = {:.12}", g(1.0, 1.0, r));
    }
    let l = LatticeSpec::new(1, 2)?;
    let model = ModelSpec::new(HoppingSpec::nearest_neighbour(l, -0.25), 1.0, 0.0, 0.2, 1.0)?;
    for row in density_band_check(&model, &[8, 12, 16], &[-1.0, 0.0, 1.0], 10_000)? {
        println!("mu {:+.1} M {:2}: {:.6} <= R = {:.6} <= {:.6}  ({} / {})",
            row.mu, row.cutoff, row.lower, row.r_value, row.upper, row.lower_status.as_str(), row.upper_status.as_str());
    }

    let w = density_window(1.0, 1.0, model.hopping.row_sum_bound(), 0.0)?;
    println!("lambda0 = {:.4e}, rho in [{:.4e}, {:.4e}]", w.lambda0, w.rho1, w.rho2);
    for s in window_empirical_check(&w, &model.with_lambda(0.0), 8, &[w.lambda0 / 2.0, w.lambda0 / 4.0])? {
        println!("lambda = {:.4e}: rho = {:.6} inside: {}", s.lambda, s.density, s.pass);
    }
    Ok(())
}
