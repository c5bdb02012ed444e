//! Canonical commutators on the interior of the truncation and the
//! closed-form momentum-space commutators.

use bhlab::bogolyubov::closed_form_deltas;
use bhlab::operators::{annihilate, commutator, create, HoppingSpec, ModelSpec, SparseOperator};
use bhlab::{LatticeSpec, TruncatedBasis};

fn main() -> bhlab::Result<()> {
    let l = LatticeSpec::new(1, 3)?;
    let model = ModelSpec::new(HoppingSpec::nearest_neighbour(l, -0.5), 1.0, 0.2, 0.3, 1.0)?;
    let b = TruncatedBasis::new(3, 5)?;

    let ccr = commutator(&annihilate(&b, 0), &create(&b, 0))?;
    let interior = b.prefix_dim(4);
    let d_in = ccr.compress(interior).max_abs_diff(&SparseOperator::identity(interior))?;
    let d_all = ccr.max_abs_diff(&SparseOperator::identity(b.dim()))?;
    println!("[c, c+] - 1: {d_in:.1e} on D^(M-1), {d_all:.1} on D^(M)");

    for k in l.brillouin_momenta() {
        let d = closed_form_deltas(&model, &b, &k)?;
        println!("k = {:?}: worst closed-form delta {:.2e}", k.integers(), d.max());
    }
    Ok(())
}
