//! Monte-Carlo risk against exactly summed risk at n = 12.

use std::sync::Arc;

use ising_scan::detect::{MagnetizationCutoff, TestSpec};
use ising_scan::graphs::{build_complete, coupling_from_graph, Scaling};
use ising_scan::model::ModelParams;
use ising_scan::risk::{estimate_risk, exact_risk, RiskOptions};
use ising_scan::signals::{make_mean_field_class, AlternativeSpec};

fn main() -> ising_scan::Result<()> {
    let n = 12;
    let q = Arc::new(coupling_from_graph(&build_complete(n), Scaling::MeanField)?);
    let cases = [
        (TestSpec::conditional_scan(0.01), 0.0, 6, 2),
        (TestSpec::naive_scan(0.1, 0.5), 0.5, 4, 3),
        (TestSpec::magnetization(MagnetizationCutoff::Fixed { threshold: 1.0 }), 1.0, 4, 3),
        (TestSpec::magnetization(MagnetizationCutoff::Calibrated { quantile: 0.9, replicates: 2000 }), 1.0, 4, 3),
    ];
    for (test, beta, s, count) in cases {
        let null = ModelParams::null(beta, Arc::clone(&q));
        let alt = AlternativeSpec::new(make_mean_field_class(n, s, count, true, 0)?, 0.5)?;
        let exact = exact_risk(&test, &null, &alt, false)?;
        let mc = estimate_risk(&test, &null, &alt, 2000, &RiskOptions::with_seed(1))?;
        println!(
            "{:<17} beta {beta}: exact I {:.4} II {:.4} | MC I {:.4}±{:.4} II {:.4}±{:.4}",
            test.kind.id(),
            exact.type1,
            exact.type2,
            mc.type1,
            mc.type1_se,
            mc.type2,
            mc.type2_se
        );
    }
    Ok(())
}
