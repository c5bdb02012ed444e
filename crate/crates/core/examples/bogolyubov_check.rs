//! Finite-cutoff Bogolyubov inequality per momentum, the projection
//! identities, and the momentum-summed chain.

use bhlab::bogolyubov::{verify_chain_inequality, verify_finite_bogolyubov, verify_projection_identities};
use bhlab::operators::{HoppingSpec, ModelSpec};
use bhlab::thermal::Equilibrium;
use bhlab::LatticeSpec;

fn main() -> bhlab::Result<()> {
    let l = LatticeSpec::new(1, 4)?;
    let model = ModelSpec::new(HoppingSpec::nearest_neighbour(l, -0.5), 1.0, 0.5, 0.2, 2.0)?;
    let eq = Equilibrium::solve(&model, 5)?;
    for k in l.brillouin_momenta() {
        let p = verify_projection_identities(&model, 5, &k, 10_000)?;
        let r = verify_finite_bogolyubov(&eq, &k)?;
        println!(
            "k = {:?}: lhs {:.6e} >= rhs {:.6e} (slack {:.3e}); identities pass: {}",
            k.integers(),
            r.lhs,
            r.rhs,
            r.slack,
            p.pass
        );
    }
    let c = verify_chain_inequality(&eq)?;
    println!("summed chain: {:.6e} <= {:.6e}: {}", c.summed_lhs, c.summed_rhs, c.pass);
    Ok(())
}
