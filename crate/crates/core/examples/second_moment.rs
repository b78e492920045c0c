//! Second moment of the mixture likelihood ratio on a 12-cycle, as a
//! function of the signal strength.

use std::sync::Arc;

use ising_scan::graphs::{build_regular_circulant, coupling_from_graph, Scaling};
use ising_scan::model::ModelParams;
use ising_scan::oracle::{second_moment_mixture, SecondMomentMode};
use ising_scan::signals::make_mean_field_class;

fn main() -> ising_scan::Result<()> {
    let n = 12;
    let q = Arc::new(coupling_from_graph(&build_regular_circulant(n, 2)?, Scaling::MeanField)?);
    let null = ModelParams::null(0.4, q);
    let class = make_mean_field_class(n, 3, 4, true, 0)?;
    println!("{:>8} {:>12}", "tanh A", "E0[L^2]");
    for t in [0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.95] {
        let r = second_moment_mixture(&null, &class, f64::atanh(t), SecondMomentMode::FiniteA)?;
        println!("{t:>8.2} {:>12.6}", r.value);
    }
    let limit = second_moment_mixture(&null, &class, 0.0, SecondMomentMode::LimitAInfinity)?;
    println!("{:>8} {:>12.6}", "inf", limit.value);
    Ok(())
}
