//! Calibrated magnetization test on Curie-Weiss at beta = 1.

use std::sync::Arc;

use ising_scan::detect::{MagnetizationCutoff, TestSpec};
use ising_scan::graphs::{build_complete, coupling_from_graph, Scaling};
use ising_scan::model::ModelParams;
use ising_scan::risk::{estimate_risk, RiskOptions};
use ising_scan::signals::{make_mean_field_class, AlternativeSpec};

fn main() -> ising_scan::Result<()> {
    let n = 4096;
    let s = 256;
    let null = ModelParams::null(1.0, Arc::new(coupling_from_graph(&build_complete(n), Scaling::MeanField)?));
    let test = TestSpec::magnetization(MagnetizationCutoff::Calibrated { quantile: 0.95, replicates: 2000 });
    let scale = (n as f64).powf(0.25) / s as f64;
    for mult in [1.0, 2.0, 4.0, 8.0] {
        let alt = AlternativeSpec::new(make_mean_field_class(n, s, 1, true, 0)?, mult * scale)?;
        let est = estimate_risk(&test, &null, &alt, 500, &RiskOptions::with_seed(3))?;
        println!(
            "sA = {mult} n^(1/4): cutoff {:.3}  type I {:.3}  power {:.3}",
            est.calibrated_threshold.unwrap_or(f64::NAN),
            est.type1,
            1.0 - est.type2
        );
    }
    Ok(())
}
