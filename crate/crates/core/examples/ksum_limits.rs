//! Momentum sums against their infinite-volume integrals.

use bhlab::bounds::ksum_vs_integral;

fn main() -> bhlab::Result<()> {
    let t = ksum_vs_integral(1, &[8, 16, 32, 64, 128], 1.0, 1.0)?;
    println!("d = 1, limit {:.15}", t.limit);
    for r in &t.rows {
        println!("N = {:4}: S = {:.15}, error {:.3e}, ratio {:?}", r.size, r.sum, r.error, r.ratio);
    }
    for alpha in [1.0, 0.1, 0.01] {
        let t = ksum_vs_integral(2, &[16, 32], 1.0, alpha)?;
        println!("d = 2, alpha = {alpha}: limit {:.6} > lower bound {:.6}", t.limit, t.lower_bound.unwrap());
    }
    Ok(())
}
