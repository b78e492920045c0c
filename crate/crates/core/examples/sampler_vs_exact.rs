//! Compares Glauber, lumped and exact samplers against enumerated moments on
//! a small Curie-Weiss model, then writes a sample dump.

use std::sync::Arc;

use ising_scan::graphs::{build_complete, coupling_from_graph, Scaling};
use ising_scan::model::{read_samples, write_samples, ModelParams, PreparedSampler, SamplerChoice, SamplerConfig};
use ising_scan::oracle::{moments, Conditioning};

fn main() -> ising_scan::Result<()> {
    let n = 10;
    let q = Arc::new(coupling_from_graph(&build_complete(n), Scaling::MeanField)?);
    let params = ModelParams::null(1.0, q);
    let exact = moments(&params, Conditioning::None)?;
    println!("exact E[X0 X1] = {:.5}", exact.second_moment(0, 1));

    let cfg = SamplerConfig { num_samples: 200_000, ..SamplerConfig::default() };
    for choice in [SamplerChoice::Glauber, SamplerChoice::LumpedComplete, SamplerChoice::ExactEnumeration] {
        let sampler = PreparedSampler::prepare(&params, choice, &cfg)?;
        let mut acc = 0i64;
        sampler.draw_with(42, cfg.num_samples, |x| acc += (x.spin(0) * x.spin(1)) as i64)?;
        println!("{:<16} E[X0 X1] = {:.5}", format!("{choice:?}"), acc as f64 / cfg.num_samples as f64);
    }

    let samples = PreparedSampler::prepare(&params, SamplerChoice::Auto, &cfg)?.draw(3, 4)?;
    let mut dump = Vec::new();
    write_samples(&mut dump, n, 3, &samples)?;
    print!("{}", String::from_utf8_lossy(&dump));
    assert_eq!(read_samples(dump.as_slice())?.samples, samples);
    Ok(())
}
