//! Small risk sweep over (beta, tanh A) written to CSV; rerunning resumes.

use ising_scan::detect::TestSpec;
use ising_scan::graphs::GraphSpec;
use ising_scan::model::{SamplerChoice, SamplerConfig};
use ising_scan::risk::{boundary_sweep_csv, AxisA, ClassRule, SweepGrid};

fn main() -> ising_scan::Result<()> {
    let grid = SweepGrid {
        graph: GraphSpec::complete(400),
        betas: vec![0.5, 1.0],
        s_values: vec![20],
        signal: AxisA::TanhA(vec![0.1, 0.3, 0.5, 0.7, 0.9]),
        tests: vec![TestSpec::conditional_scan(0.1), TestSpec::naive_scan(0.1, 0.5)],
        class: ClassRule { count: 10 },
        replicates: 200,
        seed: 2024,
        sampler: SamplerChoice::Auto,
        chain: SamplerConfig::default(),
        exhaustive: false,
    };
    let path = std::env::temp_dir().join("ising_scan_sweep.csv");
    let _ = std::fs::remove_file(&path);
    let records = boundary_sweep_csv(&grid, &path, None)?;
    for r in &records {
        println!("beta {:<4} tanhA {:<4} {:<17} risk {:.3}", r.beta, r.tanh_a, r.test, r.risk);
    }
    println!("wrote {} rows to {}", records.len(), path.display());
    Ok(())
}
