//! Acceptance run: every criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.
//!
//! Criteria 1-9 are run twice into separate directories; criterion 10
//! compares the two sets of output files byte for byte.

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::json;

use ising_scan::detect::{Detector, MagnetizationCutoff, TestSpec};
use ising_scan::graphs::{build_complete, build_regular_circulant, coupling_from_graph, CouplingMatrix, Scaling};
use ising_scan::model::{GlauberChain, InitialState, ModelParams, PreparedSampler, SamplerChoice, SamplerConfig};
use ising_scan::oracle::{
    chain_correlation, moments, second_moment_mixture, small_marginal_deviation, verify_inequalities, Conditioning,
    SecondMomentMode,
};
use ising_scan::risk::{estimate_risk, exact_risk, RiskEstimate, RiskOptions};
use ising_scan::rng::derive_seed;
use ising_scan::signals::{make_mean_field_class, AlternativeSpec};
use ising_scan::Result;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    summary: String,
    files: Vec<(String, String)>,
}

fn curie_weiss(n: usize) -> Arc<CouplingMatrix> {
    Arc::new(coupling_from_graph(&build_complete(n), Scaling::MeanField).expect("complete graph"))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

/// Glauber pair moments on Curie-Weiss n = 10 against enumeration.
fn sampler_oracle_agreement() -> Result<Outcome> {
    let n = 10;
    let q = curie_weiss(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for (k, beta) in [0.5, 1.0, 1.5].into_iter().enumerate() {
        let params = ModelParams::null(beta, Arc::clone(&q));
        let exact = moments(&params, Conditioning::None)?;
        let cfg = SamplerConfig { num_samples: 1_000_000, ..SamplerConfig::default() };
        let mut chain = GlauberChain::new(&params, InitialState::Random, derive_seed(SEED, &[1, k as u64]));
        let mut acc = vec![0i64; pairs.len()];
        chain.run_with(&cfg, |x| {
            let s = x.to_spins();
            for (a, &(i, j)) in acc.iter_mut().zip(&pairs) {
                *a += (s[i] * s[j]) as i64;
            }
        })?;
        let dev = pairs
            .iter()
            .zip(&acc)
            .map(|(&(i, j), &a)| (a as f64 / cfg.num_samples as f64 - exact.second_moment(i, j)).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        rows.push(json!({ "beta": beta, "pairs": pairs.len(), "max_abs_error": dev,
                          "exact_pair_moment": exact.second_moment(0, 1) }));
    }
    Ok(Outcome {
        pass: worst <= 0.01,
        summary: format!("max |E_glauber - E_exact| over 45 pairs x 3 betas = {worst:.4} (tol 0.01)"),
        files: vec![("c1_sampler_oracle.json".into(), pretty(&json!(rows)))],
    })
}

fn large_cw_setting() -> Result<(ModelParams, ising_scan::signals::SignalClass, usize)> {
    let n = 2000;
    let s = (4.0 * (n as f64).ln()).ceil() as usize;
    let class = make_mean_field_class(n, s, 50, true, 0)?;
    Ok((ModelParams::null(0.5, curie_weiss(n)), class, s))
}

/// Null rejection rate of the conditional scan on K_2000.
fn conditional_scan_type1() -> Result<Outcome> {
    let (null, class, s) = large_cw_setting()?;
    let detector = Detector::new(TestSpec::conditional_scan(0.1), &null, &class)?;
    let sampler = PreparedSampler::prepare(&null, SamplerChoice::Auto, &SamplerConfig::default())?;
    let replicates = 500u64;
    let rejections: usize = (0..replicates)
        .into_par_iter()
        .map(|r| Ok(usize::from(detector.rejects(&sampler.draw_one(derive_seed(SEED, &[2, r]))?)?)))
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    let type1 = rejections as f64 / replicates as f64;
    Ok(Outcome {
        pass: type1 <= 0.05,
        summary: format!("n=2000 s={s} |C|=50: type I = {type1:.4} over {replicates} replicates (need <= 0.05)"),
        files: vec![(
            "c2_type1.json".into(),
            pretty(&json!({ "n": 2000, "s": s, "sets": 50, "rejections": rejections, "type1": type1,
                            "sampler": format!("{:?}", sampler.kind()) })),
        )],
    })
}

fn risk_json(e: &RiskEstimate) -> serde_json::Value {
    serde_json::to_value(e).expect("json")
}

/// Power of both scans at `tanh A = 4 sqrt(log n / s)`.
fn power_above_boundary() -> Result<Outcome> {
    let (null, class, s) = large_cw_setting()?;
    let target = 4.0 * ((2000f64).ln() / s as f64).sqrt();
    // The target exceeds 1 here; saturate at the strongest representable signal.
    let tanh_a = target.min(1.0 - 1e-9);
    let alt = AlternativeSpec::from_tanh(class, tanh_a)?;
    let opts = RiskOptions::with_seed(derive_seed(SEED, &[3]));
    let cond = estimate_risk(&TestSpec::conditional_scan(0.1), &null, &alt, 500, &opts)?;
    let naive = estimate_risk(&TestSpec::naive_scan(0.1, 0.5), &null, &alt, 500, &opts)?;
    Ok(Outcome {
        pass: cond.risk <= 0.1 && naive.risk <= 0.1,
        summary: format!(
            "target tanh A = {target:.3} (used {tanh_a:.9}); conditional risk = {:.3} (I {:.3}, II {:.3}), naive risk = {:.3} (I {:.3}, II {:.3}); need both <= 0.1",
            cond.risk, cond.type1, cond.type2, naive.risk, naive.type1, naive.type2
        ),
        files: vec![(
            "c3_power.json".into(),
            pretty(&json!({ "target_tanh_a": target, "tanh_a": tanh_a,
                            "conditional_scan": risk_json(&cond), "naive_scan": risk_json(&naive) })),
        )],
    })
}

/// Exact second moment on the 12-cycle.
fn second_moment_lower_bound() -> Result<Outcome> {
    let n = 12;
    let q = Arc::new(coupling_from_graph(&build_regular_circulant(n, 2)?, Scaling::MeanField)?);
    let null = ModelParams::null(0.4, q);
    let class = make_mean_field_class(n, 3, 2, true, 0)?;
    let t0 = 0.1 * ((n as f64).ln() / 3.0).sqrt();
    let at_boundary = second_moment_mixture(&null, &class, t0.atanh(), SecondMomentMode::FiniteA)?.value;
    let mut grid: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).chain([t0]).collect();
    grid.sort_by(f64::total_cmp);
    let values = grid
        .iter()
        .map(|t| Ok(second_moment_mixture(&null, &class, t.atanh(), SecondMomentMode::FiniteA)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let monotone = values.windows(2).all(|w| w[1] >= w[0] - 1e-10);
    Ok(Outcome {
        pass: at_boundary <= 1.05 && monotone,
        summary: format!(
            "E0[L^2] = {at_boundary:.6} at tanh A = {t0:.4} (need <= 1.05); nondecreasing over {} grid points: {monotone}",
            grid.len()
        ),
        files: vec![(
            "c4_second_moment.json".into(),
            pretty(&json!({ "tanh_a": grid, "value": values, "boundary_value": at_boundary })),
        )],
    })
}

fn inequality_suite() -> Result<Outcome> {
    let report = verify_inequalities(500, derive_seed(SEED, &[5]), 1e-10)?;
    let names: Vec<String> = report.checks.iter().map(|c| format!("{}={}", c.name, c.violations)).collect();
    Ok(Outcome {
        pass: report.total_violations == 0 && report.instances == 500,
        summary: format!("{} instances, violations: {}", report.instances, names.join(", ")),
        files: vec![("c5_inequalities.json".into(), report.to_json() + "\n")],
    })
}

fn chain_decay() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for beta in [0.3, 0.6, 0.9] {
        let c = chain_correlation(14, beta)?;
        let dev = c.max_product_deviation();
        worst = worst.max(dev);
        rows.push(json!({ "beta": beta, "max_deviation": dev, "corr_0_13": c.get(0, 13) }));
    }
    Ok(Outcome {
        pass: worst <= 1e-12,
        summary: format!("max |E X_i X_j - tanh(beta)^|i-j|| = {worst:.2e} (tol 1e-12)"),
        files: vec![("c6_chain.json".into(), pretty(&json!(rows)))],
    })
}

/// Calibrated magnetization test at criticality.
fn critical_magnetization() -> Result<Outcome> {
    let n = 4096;
    let s = 256;
    let a = 8.0 * (n as f64).powf(0.25) / s as f64;
    let null = ModelParams::null(1.0, curie_weiss(n));
    let alt = AlternativeSpec::new(make_mean_field_class(n, s, 1, true, 0)?, a)?;
    let test = TestSpec::magnetization(MagnetizationCutoff::Calibrated { quantile: 0.95, replicates: 2000 });
    let est = estimate_risk(&test, &null, &alt, 500, &RiskOptions::with_seed(derive_seed(SEED, &[7])))?;
    let power = 1.0 - est.type2;
    Ok(Outcome {
        pass: (est.type1 - 0.05).abs() <= 0.02 && power >= 0.8,
        summary: format!(
            "cutoff {:.4}; null rejection {:.3} (need 0.05 +- 0.02); power {:.3} at A = {a} (need >= 0.8)",
            est.calibrated_threshold.unwrap_or(f64::NAN),
            est.type1,
            power
        ),
        files: vec![("c7_magnetization.json".into(), pretty(&json!({ "a": a, "estimate": risk_json(&est) })))],
    })
}

fn small_marginals() -> Result<Outcome> {
    let sizes = [8, 12, 16, 20];
    let devs = sizes
        .iter()
        .map(|&n| Ok(small_marginal_deviation(&ModelParams::null(0.5, curie_weiss(n)), 2)?.deviation))
        .collect::<Result<Vec<f64>>>()?;
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let ratio = devs[0] / devs[3];
    Ok(Outcome {
        pass: decreasing && ratio >= 1.5,
        summary: format!(
            "deviation at n=8,12,16,20: {}; strictly decreasing: {decreasing}; ratio n=8/n=20 = {ratio:.3} (need >= 1.5)",
            devs.iter().map(|d| format!("{d:.5}")).collect::<Vec<_>>().join(", ")
        ),
        files: vec![("c8_marginals.json".into(), pretty(&json!({ "n": sizes, "deviation": devs })))],
    })
}

fn binomial_se(p: f64, r: usize) -> f64 {
    (p * (1.0 - p) / r as f64).sqrt()
}

/// Monte-Carlo risk against exact risk for every test kind at n = 12.
fn mc_vs_exact() -> Result<Outcome> {
    let n = 12;
    let q = curie_weiss(n);
    let cases = [
        ("conditional_scan", TestSpec::conditional_scan(0.01), 0.0, 6, 2),
        ("naive_scan", TestSpec::naive_scan(0.1, 0.5), 0.5, 4, 3),
        ("magnetization", TestSpec::magnetization(MagnetizationCutoff::Fixed { threshold: 1.0 }), 1.0, 4, 3),
        ("accept_always", TestSpec::constant(false), 0.5, 4, 3),
        ("reject_always", TestSpec::constant(true), 0.5, 4, 3),
    ];
    let replicates = 2000;
    let mut csv =
        String::from("test,beta,s,sets,exact_type1,exact_type2,exact_risk,mc_type1,mc_type2,mc_risk,se,pass\n");
    let mut all = true;
    let mut failed = Vec::new();
    for (k, (name, test, beta, s, count)) in cases.iter().enumerate() {
        let null = ModelParams::null(*beta, Arc::clone(&q));
        let alt = AlternativeSpec::new(make_mean_field_class(n, *s, *count, true, 0)?, 0.5)?;
        let exact = exact_risk(test, &null, &alt, false)?;
        let mc =
            estimate_risk(test, &null, &alt, replicates, &RiskOptions::with_seed(derive_seed(SEED, &[9, k as u64])))?;
        let se = (binomial_se(exact.type1, replicates).powi(2) + binomial_se(exact.type2, replicates).powi(2)).sqrt();
        let ok = (mc.risk - exact.risk).abs() <= 3.0 * se + 1e-12;
        all &= ok;
        if !ok {
            failed.push(*name);
        }
        csv.push_str(&format!(
            "{name},{beta},{s},{count},{},{},{},{},{},{},{},{ok}\n",
            exact.type1, exact.type2, exact.risk, mc.type1, mc.type2, mc.risk, se
        ));
    }
    Ok(Outcome {
        pass: all,
        summary: if all {
            format!("{} test kinds agree within 3 SE over {replicates} replicates", cases.len())
        } else {
            format!("disagreement for {}", failed.join(", "))
        },
        files: vec![("c9_mc_vs_exact.csv".into(), csv)],
    })
}

type Criterion = (&'static str, u64, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 9] = [
    ("sampler-oracle agreement", 60, sampler_oracle_agreement),
    ("conditional scan type I control", 600, conditional_scan_type1),
    ("power above the boundary", 900, power_above_boundary),
    ("second moment lower bound", 60, second_moment_lower_bound),
    ("inequality suite", 120, inequality_suite),
    ("chain correlation decay", 30, chain_decay),
    ("critical magnetization test", 1200, critical_magnetization),
    ("small-marginal uniformity", 120, small_marginals),
    ("MC vs exact risk", 300, mc_vs_exact),
];

fn run_all(dir: &Path, report: bool) -> bool {
    std::fs::create_dir_all(dir).expect("output dir");
    let mut all = true;
    for (k, (name, budget, f)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (pass, summary) = match outcome {
            Ok(o) => {
                for (file, text) in &o.files {
                    std::fs::write(dir.join(file), text).expect("write output");
                }
                (o.pass && in_time, o.summary)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        if report {
            println!(
                "criterion {:>2} [{}] {name}: {summary} ({:.1}s, budget {budget}s)",
                k + 1,
                if pass { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64()
            );
        }
    }
    all
}

fn identical_outputs(a: &Path, b: &Path) -> (bool, usize) {
    let mut names: Vec<_> = std::fs::read_dir(a).expect("dir").map(|e| e.expect("entry").file_name()).collect();
    names.sort();
    let same = names.iter().all(|f| match (std::fs::read(a.join(f)), std::fs::read(b.join(f))) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    });
    (same && !names.is_empty(), names.len())
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("tempdir");
    let first = tmp.path().join("run1");
    let second = tmp.path().join("run2");
    let mut all = run_all(&first, true);
    let start = Instant::now();
    run_all(&second, false);
    let (same, files) = identical_outputs(&first, &second);
    all &= same;
    println!(
        "criterion 10 [{}] determinism: {files} output files from criteria 1-9 {} across reruns ({:.1}s)",
        if same { "PASS" } else { "FAIL" },
        if same { "byte-identical" } else { "differ" },
        start.elapsed().as_secs_f64()
    );
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}
