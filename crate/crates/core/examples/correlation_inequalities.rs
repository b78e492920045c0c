//! Runs the randomized GKS / GHS / Griffiths-II / field-bound suite.

use ising_scan::oracle::{random_instance, verify_inequalities};

fn main() -> ising_scan::Result<()> {
    let inst = random_instance(1);
    println!("first instance: n = {}, beta = {:.3}", inst.n(), inst.beta);
    let report = verify_inequalities(300, 11, 1e-10)?;
    for c in &report.checks {
        println!("{:<26} evaluated {:>7}  violations {}", c.name, c.evaluated, c.violations);
    }
    println!("total violations: {}", report.total_violations);
    Ok(())
}
