//! How far small-set marginals of Curie-Weiss are from uniform, exactly and
//! by sampling.

use std::sync::Arc;

use ising_scan::graphs::{build_complete, coupling_from_graph, Scaling};
use ising_scan::model::{ModelParams, SamplerChoice};
use ising_scan::oracle::{small_marginal_deviation, small_marginal_deviation_mc};

fn main() -> ising_scan::Result<()> {
    for n in [8, 12, 16, 20] {
        let params = ModelParams::null(0.5, Arc::new(coupling_from_graph(&build_complete(n), Scaling::MeanField)?));
        let r = small_marginal_deviation(&params, 2)?;
        println!("n {n:>2}: sup |2^s P(X_S = a) - 1| = {:.5} at {:?}", r.deviation, r.worst_set);
    }
    let n = 200;
    let params = ModelParams::null(0.5, Arc::new(coupling_from_graph(&build_complete(n), Scaling::MeanField)?));
    let sets = vec![vec![0, 1], vec![10, 20]];
    let r = small_marginal_deviation_mc(&params, &sets, 20_000, 9, SamplerChoice::Auto)?;
    println!("n {n}: sampled deviation {:.4} (se {:.4})", r.deviation, r.mc_standard_error.unwrap_or(f64::NAN));
    Ok(())
}
