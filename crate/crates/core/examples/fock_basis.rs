//! Sector-ordered truncated basis: dimensions, sector ranges and lookup.

use bhlab::fock::{truncated_dim, TruncatedBasis};

fn main() -> bhlab::Result<()> {
    let b = TruncatedBasis::new(3, 3)?;
    println!("3 sites, M = 3: dim {} (formula {})", b.dim(), truncated_dim(3, 3));
    for m in 0..=b.cutoff() {
        let r = b.sector_range(m);
        let states: Vec<_> = r.clone().map(|i| b.state(i).to_vec()).collect();
        println!("sector {m}: indices {r:?} {states:?}");
    }
    println!("index of [1, 0, 2] = {}", b.index_of(&[1, 0, 2])?);
    println!("M = 3 basis is the leading block of M = 4: {}", {
        let big = TruncatedBasis::new(3, 4)?;
        (0..b.dim()).all(|i| b.state(i) == big.state(i))
    });
    Ok(())
}
