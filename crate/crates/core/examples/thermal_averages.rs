//! Spectrum, Gibbs averages and their convergence in the cutoff.

use bhlab::operators::{HoppingSpec, ModelSpec};
use bhlab::thermal::{convergence_study, Equilibrium};
use bhlab::LatticeSpec;

fn main() -> bhlab::Result<()> {
    let l = LatticeSpec::new(1, 2)?;
    let model = ModelSpec::new(HoppingSpec::nearest_neighbour(l, -0.5), 1.0, 0.0, 0.5, 1.0)?;

    let eq = Equilibrium::solve(&model, 6)?;
    let low: Vec<String> = eq.spectrum.eigenvalues()[..4].iter().map(|e| format!("{e:.6}")).collect();
    println!("M = 6: dim {}, lowest levels {low:?}", eq.basis.dim());
    println!("rho = {:.10}, m = {:.10}, log Tr e^(-bH) = {:.10}", eq.density(), eq.order_parameter(), eq.log_trace());

    let study = convergence_study(&model, &(2..=10).collect::<Vec<_>>(), 1e-6, 10_000)?;
    for r in &study.rows {
        println!("M = {:2}  rho = {:.12}  m = {:.12}  d_rho = {:?}", r.cutoff, r.density, r.order_parameter, r.d_density);
    }
    println!("converged: {}", study.cauchy);
    Ok(())
}
