//! Builds one graph of each family and prints its degree and spectral summary.

use ising_scan::graphs::{graph_stats, GraphSpec};

fn main() -> ising_scan::Result<()> {
    let specs = [
        GraphSpec::complete(200),
        GraphSpec::regular_circulant(200, 10),
        GraphSpec::random_regular(200, 10, 7),
        GraphSpec::erdos_renyi(200, 0.1, 7),
        GraphSpec::lattice(2, 14, 2),
    ];
    println!(
        "{:<28} {:>7} {:>6} {:>9} {:>9} {:>9} {:>8}",
        "graph", "avg_deg", "irreg", "inf_norm", "lambda1", "lambda2", "alpha_n"
    );
    for spec in specs {
        let stats = graph_stats(&spec.coupling()?);
        println!(
            "{:<28} {:>7.2} {:>6.3} {:>9.4} {:>9.4} {:>9.4} {:>8.4}",
            spec.id(),
            stats.avg_degree,
            stats.degree_irregularity,
            stats.inf_norm,
            stats.lambda1,
            stats.lambda2,
            stats.alpha_n()
        );
        if let Some(nominal) = stats.nominal_lattice_norm {
            println!("    nominal 2*dim*L = {nominal}");
        }
    }
    Ok(())
}
