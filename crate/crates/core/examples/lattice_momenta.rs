//! Torus arithmetic and Brillouin-zone momenta of a small square lattice.

use bhlab::LatticeSpec;

fn main() -> bhlab::Result<()> {
    let l = LatticeSpec::new(2, 3)?;
    println!("{} sites on a {}x{} torus", l.site_count(), l.size(), l.size());
    let (x, y) = (l.index_of(&[2, 1])?, l.index_of(&[1, 2])?);
    println!("(2,1) + (1,2) = {:?}", l.coords(l.add_index(x, y)));
    println!("minimal image of (2,1): {:?}", l.minimal_image(x));
    for k in l.brillouin_momenta() {
        println!("k = {:?}  |k|^2 = {:.4}  e^(ik.x) at (2,1) = {:.4}", k.integers(), k.norm_squared(), l.phase(&k, x));
    }
    Ok(())
}
