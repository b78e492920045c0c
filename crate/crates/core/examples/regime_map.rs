//! Predicted detection regime over a (beta, s) grid at n = 10^6.

use ising_scan::graphs::GraphFamily;
use ising_scan::risk::{predicted_boundary, RegimeConstants};

fn main() {
    let n = 1_000_000;
    let k = RegimeConstants::default();
    for beta in [0.5, 1.0, 1.5] {
        for s in [2, 10, 50, 100, 1000, 10_000] {
            let p = predicted_boundary(beta, n, s, &GraphFamily::Complete, k);
            let rate = p.rate.map_or("-".to_string(), |r| format!("{r:.5}"));
            println!("beta {beta:<4} s {s:>6}  {:<24} {rate}", p.regime.id());
        }
    }
}
