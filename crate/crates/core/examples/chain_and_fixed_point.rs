//! Exact chain correlations and the mean-field fixed point across beta.

use ising_scan::oracle::{chain_correlation, fixed_point};

fn main() -> ising_scan::Result<()> {
    for beta in [0.3, 0.6, 0.9] {
        let c = chain_correlation(14, beta)?;
        println!(
            "chain beta {beta}: E[X0 X5] = {:.6}, tanh^5 = {:.6}, max deviation {:.1e}",
            c.get(0, 5),
            beta.tanh().powi(5),
            c.max_product_deviation()
        );
    }
    for beta in [0.5, 1.0, 1.2, 2.0] {
        for b in [0.0, 0.1] {
            let fp = fixed_point(beta, b)?;
            println!("beta {beta:<3} B {b:<3} t = {:.6} ({:?})", fp.t, fp.regime);
        }
    }
    Ok(())
}
