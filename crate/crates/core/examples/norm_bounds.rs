//! Sector norms, sampled relative bounds and the lower bound on the spectrum.

use bhlab::bounds::{ground_energy_check, relative_bound_checks, sector_norm_checks};
use bhlab::operators::{HoppingSpec, ModelSpec};
use bhlab::thermal::Equilibrium;
use bhlab::{LatticeSpec, TruncatedBasis};

fn main() -> bhlab::Result<()> {
    let l = LatticeSpec::new(1, 3)?;
    let model = ModelSpec::new(HoppingSpec::nearest_neighbour(l, -0.5), 1.0, 0.0, 0.2, 1.0)?;
    let basis = TruncatedBasis::new(3, 6)?;
    for m in 0..=6 {
        let r = sector_norm_checks(&basis, &model, m)?;
        println!("m = {m}: |c+_x c_y| = {:.6}, |T'| = {:.4} <= {:.4}, min N2 = {:.4} >= {:.4}",
            r.pair_norm_exact, r.t_prime_norm, r.t_prime_bound, r.n2_min, r.n2_bound);
    }
    for k in [1, 2, 5] {
        let r = relative_bound_checks(&basis, &model, k, 100, 7)?;
        println!("K = {k}: violations {:?}", r.violations);
    }
    let e0 = Equilibrium::from_basis(&model, basis)?.spectrum.ground_energy();
    for e in ground_energy_check(&model, 6, e0)?.entries {
        println!("K = {}: bound {:.4e} <= lambda_min {:.4}", e.k, e.bound, e.lambda_min);
    }
    Ok(())
}
