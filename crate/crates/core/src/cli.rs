//! Config parsing and the subcommands behind the `ising-scan` binary.
//!
//! A run is described by one JSON document ([`RunConfig`]). Command-line flags
//! override the matching fields of the file, and the file overrides the
//! defaults. The fully resolved config is echoed on stderr before every run.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::detect::{Detector, MagnetizationCutoff, TestKind, TestSpec};
use crate::error::{Error, Result};
use crate::graphs::{graph_stats, write_edge_list, GraphFamily, GraphSpec};
use crate::model::{write_samples, ModelParams, PreparedSampler, SamplerChoice, SamplerConfig};
use crate::oracle::{fixed_point, second_moment_mixture, verify_inequalities, SecondMomentMode};
use crate::risk::{
    boundary_sweep_csv, calibrate_magnetization, predicted_boundary, AxisA, ClassRule, RegimeConstants, RiskOptions,
    SweepGrid,
};
use crate::rng::derive_seed;
use crate::signals::{alternative_field, make_lattice_cube_class, make_mean_field_class, AlternativeSpec, SignalClass};

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "ISING_SCAN_THREADS";

const CLASS_STREAM: u64 = 0;
const SAMPLE_STREAM: u64 = 1;
const CALIBRATION_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed of every random stream in the run. Required.
    pub seed: u64,
    #[serde(default)]
    pub graph: Option<GraphSpec>,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub signal: Option<SignalConfig>,
    #[serde(default = "default_test")]
    pub test: TestSpec,
    #[serde(default)]
    pub sampler: SamplerChoice,
    /// Chain settings; its `seed` is replaced by the run seed.
    #[serde(default)]
    pub chain: SamplerConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub predict: PredictConfig,
    #[serde(default)]
    pub regime: RegimeConstants,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// JSON-lines mirror of sweep records.
    #[serde(default)]
    pub json_out: Option<PathBuf>,
}

fn default_test() -> TestSpec {
    TestSpec::conditional_scan(0.1)
}

/// Signal class and (optionally) a planted alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub s: usize,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default = "yes")]
    pub disjoint: bool,
    /// Signal strength; zero means the null model.
    #[serde(default)]
    pub tanh_a: f64,
    /// Set carrying the field when sampling under the alternative.
    #[serde(default)]
    pub planted: usize,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl SignalConfig {
    pub fn class(&self, graph: &GraphSpec, seed: u64) -> Result<SignalClass> {
        match graph.family {
            GraphFamily::Lattice { dim, side, .. } => make_lattice_cube_class(dim, side, self.s),
            _ => make_mean_field_class(graph.n, self.s, self.count, self.disjoint, derive_seed(seed, &[CLASS_STREAM])),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub instances: usize,
    pub tolerance: f64,
    /// Field `B` of the mean-field fixed point.
    pub b: f64,
    pub mode: SecondMomentMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { instances: 500, tolerance: 1e-10, b: 0.0, mode: SecondMomentMode::FiniteA }
    }
}

/// Sweep axes; graph, seed and sampler come from the enclosing config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub betas: Vec<f64>,
    pub s_values: Vec<usize>,
    pub signal: AxisA,
    pub tests: Vec<TestSpec>,
    #[serde(default = "default_class_rule")]
    pub class: ClassRule,
    pub replicates: usize,
    #[serde(default)]
    pub exhaustive: bool,
}

fn default_class_rule() -> ClassRule {
    ClassRule { count: 10 }
}

/// `n` and `s` of the regime map; default to the graph size and signal size.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    pub n: Option<usize>,
    pub s: Option<usize>,
}

impl RunConfig {
    /// Checks cross-field consistency and fills derived defaults.
    pub fn resolve(mut self) -> Result<Self> {
        self.chain.seed = self.seed;
        if !self.beta.is_finite() {
            return Err(Error::Config(format!("beta: must be finite, got {}", self.beta)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads: must be at least 1".into()));
        }
        self.test.validate().map_err(|e| Error::Config(format!("test: {e}")))?;
        if let Some(g) = &self.graph {
            g.validate().map_err(|e| Error::Config(format!("graph: {e}")))?;
        }
        if let Some(sig) = &self.signal {
            if !(0.0..1.0).contains(&sig.tanh_a) {
                return Err(Error::Config(format!("signal.tanh_a: must lie in [0, 1), got {}", sig.tanh_a)));
            }
            if let Some(g) = &self.graph {
                let class = sig.class(g, self.seed).map_err(|e| Error::Config(format!("signal: {e}")))?;
                if sig.planted >= class.len() {
                    return Err(Error::Config(format!(
                        "signal.planted: index {} but the class has {} sets",
                        sig.planted,
                        class.len()
                    )));
                }
            }
        }
        if self.sweep.is_some() && self.graph.is_some() {
            self.sweep_grid()?.validate().map_err(|e| Error::Config(format!("sweep: {e}")))?;
        }
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    fn graph(&self) -> Result<&GraphSpec> {
        self.graph.as_ref().ok_or_else(|| Error::Config("graph: required by this subcommand".into()))
    }

    fn signal(&self) -> Result<&SignalConfig> {
        self.signal.as_ref().ok_or_else(|| Error::Config("signal: required by this subcommand".into()))
    }

    fn null_model(&self) -> Result<ModelParams> {
        Ok(ModelParams::null(self.beta, Arc::new(self.graph()?.coupling()?)))
    }

    fn class(&self) -> Result<SignalClass> {
        self.signal()?.class(self.graph()?, self.seed)
    }

    /// Null model, or the planted alternative when `signal.tanh_a > 0`.
    fn sampling_model(&self, null: &ModelParams) -> Result<ModelParams> {
        match &self.signal {
            Some(sig) if sig.tanh_a > 0.0 => {
                let alt = AlternativeSpec::from_tanh(self.class()?, sig.tanh_a)?;
                null.with_field(alternative_field(&alt, sig.planted)?)
            }
            _ => Ok(null.clone()),
        }
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid> {
        let sw = self.sweep.as_ref().ok_or_else(|| Error::Config("sweep: required by this subcommand".into()))?;
        Ok(SweepGrid {
            graph: *self.graph()?,
            betas: sw.betas.clone(),
            s_values: sw.s_values.clone(),
            signal: sw.signal.clone(),
            tests: sw.tests.clone(),
            class: sw.class,
            replicates: sw.replicates,
            seed: self.seed,
            sampler: self.sampler,
            chain: self.chain,
            exhaustive: sw.exhaustive,
        })
    }
}

fn config_error(e: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = e.path().to_string();
    let inner = e.into_inner();
    if path == "." {
        Error::Config(inner.to_string())
    } else {
        Error::Config(format!("{path}: {inner}"))
    }
}

/// Parses and validates a JSON run config.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(config_error)?;
    cfg.resolve()
}

/// Like [`parse_config`] but from an already parsed document.
pub fn parse_config_value(value: Value) -> Result<RunConfig> {
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(config_error)?;
    cfg.resolve()
}

#[derive(Debug, Parser)]
#[command(name = "ising-scan", version, about = "Detect structured external fields in Ising models")]
pub struct Cli {
    /// JSON run config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (fallback: ISING_SCAN_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build the graph; write its edge list and print its statistics.
    Graph,
    /// Draw configurations and write a sample dump.
    Sample {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Draw one configuration and run the configured test on it.
    Test,
    /// Exact oracles.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
    /// Risk sweep over the configured grid, written as CSV.
    Sweep {
        /// JSON-lines mirror of the records.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Predicted detection regime and rate.
    Predict {
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum OracleCommand {
    /// Check the correlation inequalities on random instances.
    Verify {
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Second moment of the mixture likelihood ratio.
    SecondMoment {
        #[arg(long)]
        tanh_a: Option<f64>,
        /// Use the `A → ∞` limit.
        #[arg(long)]
        limit: bool,
    },
    /// Solve `t = tanh(βt + B)`.
    FixedPoint {
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
}

impl Command {
    /// Subcommands that use no randomness and may run without a seed.
    fn is_deterministic(&self) -> bool {
        matches!(self, Command::Predict { .. } | Command::Oracle { action: OracleCommand::FixedPoint { .. } })
    }
}

fn set(root: &mut Value, path: &[&str], v: Value) {
    let mut cur = root;
    for key in &path[..path.len() - 1] {
        let obj = cur.as_object_mut().expect("config objects");
        cur = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
        if cur.is_null() {
            *cur = Value::Object(Map::new());
        }
    }
    cur.as_object_mut().expect("config objects").insert(path[path.len() - 1].to_string(), v);
}

/// Merges the config file, `env_threads` and the flags of `cli`.
pub fn resolve_config(cli: &Cli, env_threads: Option<&str>) -> Result<RunConfig> {
    let mut root = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let v: Value = serde_path_to_error::deserialize(de).map_err(config_error)?;
            if !v.is_object() {
                return Err(Error::Config(format!("{}: expected a JSON object", path.display())));
            }
            v
        }
        None => Value::Object(Map::new()),
    };
    let threads = match (cli.threads, env_threads) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => {
            Some(s.trim().parse::<usize>().map_err(|_| Error::Config(format!("{THREADS_ENV}: not a count: `{s}`")))?)
        }
        (None, None) => None,
    };
    if let Some(seed) = cli.seed {
        set(&mut root, &["seed"], seed.into());
    }
    if let Some(t) = threads {
        set(&mut root, &["threads"], t.into());
    }
    if let Some(out) = &cli.out {
        set(&mut root, &["out"], out.to_string_lossy().as_ref().into());
    }
    match &cli.command {
        Command::Sample { count: Some(c) } => set(&mut root, &["chain", "num_samples"], (*c).into()),
        Command::Sweep { json: Some(p) } => set(&mut root, &["json_out"], p.to_string_lossy().as_ref().into()),
        Command::Predict { beta, n, s } => {
            if let Some(b) = beta {
                set(&mut root, &["beta"], (*b).into());
            }
            if let Some(n) = n {
                set(&mut root, &["predict", "n"], (*n).into());
            }
            if let Some(s) = s {
                set(&mut root, &["predict", "s"], (*s).into());
            }
        }
        Command::Oracle { action } => match action {
            OracleCommand::Verify { instances, tolerance } => {
                if let Some(i) = instances {
                    set(&mut root, &["oracle", "instances"], (*i).into());
                }
                if let Some(t) = tolerance {
                    set(&mut root, &["oracle", "tolerance"], (*t).into());
                }
            }
            OracleCommand::SecondMoment { tanh_a, limit } => {
                if let Some(t) = tanh_a {
                    set(&mut root, &["signal", "tanh_a"], (*t).into());
                }
                if *limit {
                    set(&mut root, &["oracle", "mode"], "limit_a_infinity".into());
                }
            }
            OracleCommand::FixedPoint { beta, b } => {
                if let Some(beta) = beta {
                    set(&mut root, &["beta"], (*beta).into());
                }
                if let Some(b) = b {
                    set(&mut root, &["oracle", "b"], (*b).into());
                }
            }
        },
        _ => {}
    }
    if cli.command.is_deterministic() && root.get("seed").is_none() {
        set(&mut root, &["seed"], 0.into());
    }
    parse_config_value(root)
}

fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

/// Three significant digits.
fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let digits = (2 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.digits$}")
}

/// Runs one subcommand. Returns `false` when the run completed but its check
/// failed (inequality violations).
pub fn run(cmd: &Command, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    match cmd {
        Command::Graph => {
            let spec = cfg.graph()?;
            let adj = spec.build()?;
            let stats = graph_stats(&spec.coupling()?);
            let stats_json = serde_json::to_string(&stats)?;
            match &cfg.out {
                Some(p) => {
                    with_output(Some(p), stdout, |w| write_edge_list(&adj, w))?;
                    writeln!(stdout, "{stats_json}")?;
                }
                None => {
                    write_edge_list(&adj, &mut *stdout)?;
                    writeln!(stderr, "{stats_json}")?;
                }
            }
        }
        Command::Sample { .. } => {
            let null = cfg.null_model()?;
            let params = cfg.sampling_model(&null)?;
            let sampler = PreparedSampler::prepare(&params, cfg.sampler, &cfg.chain)?;
            let samples = sampler.draw(cfg.seed, cfg.chain.num_samples)?;
            writeln!(stderr, "# sampler {:?}", sampler.kind())?;
            with_output(cfg.out.as_deref(), stdout, |w| write_samples(w, params.n(), cfg.seed, &samples))?;
        }
        Command::Test => {
            let null = cfg.null_model()?;
            let class = cfg.class()?;
            let params = cfg.sampling_model(&null)?;
            let x = PreparedSampler::prepare(&params, cfg.sampler, &cfg.chain)?
                .draw_one(derive_seed(cfg.seed, &[SAMPLE_STREAM]))?;
            let spec = match cfg.test.cutoff {
                Some(MagnetizationCutoff::Calibrated { quantile, replicates })
                    if cfg.test.kind == TestKind::Magnetization =>
                {
                    let opts = RiskOptions {
                        seed: derive_seed(cfg.seed, &[CALIBRATION_STREAM]),
                        sampler: cfg.sampler,
                        chain: cfg.chain,
                        exhaustive: false,
                    };
                    let threshold = calibrate_magnetization(&null, quantile, replicates, &opts)?;
                    TestSpec::magnetization(MagnetizationCutoff::Fixed { threshold })
                }
                _ => cfg.test,
            };
            let result = Detector::new(spec, &null, &class)?.evaluate(&x)?;
            let json = serde_json::to_string(&result)?;
            with_output(cfg.out.as_deref(), stdout, |w| Ok(writeln!(w, "{json}")?))?;
        }
        Command::Oracle { action } => match action {
            OracleCommand::Verify { .. } => {
                let report = verify_inequalities(cfg.oracle.instances, cfg.seed, cfg.oracle.tolerance)?;
                let json = report.to_json();
                with_output(cfg.out.as_deref(), stdout, |w| Ok(writeln!(w, "{json}")?))?;
                writeln!(stderr, "# {} instances, {} violations", report.instances, report.total_violations)?;
                return Ok(report.total_violations == 0);
            }
            OracleCommand::SecondMoment { .. } => {
                let null = cfg.null_model()?;
                let class = cfg.class()?;
                let a = cfg.signal()?.tanh_a.atanh();
                let report = second_moment_mixture(&null, &class, a, cfg.oracle.mode)?;
                let json = serde_json::to_string(&report)?;
                with_output(cfg.out.as_deref(), stdout, |w| Ok(writeln!(w, "{json}")?))?;
            }
            OracleCommand::FixedPoint { .. } => {
                let fp = fixed_point(cfg.beta, cfg.oracle.b)?;
                let json = serde_json::to_string(&fp)?;
                with_output(cfg.out.as_deref(), stdout, |w| Ok(writeln!(w, "{json}")?))?;
            }
        },
        Command::Sweep { .. } => {
            let grid = cfg.sweep_grid()?;
            let out = cfg.out.as_deref().ok_or_else(|| Error::Config("out: sweep needs a CSV path".into()))?;
            let records = boundary_sweep_csv(&grid, out, cfg.json_out.as_deref())?;
            writeln!(stdout, "{} records written to {}", records.len(), out.display())?;
        }
        Command::Predict { .. } => {
            let n = cfg
                .predict
                .n
                .or(cfg.graph.map(|g| g.n))
                .ok_or_else(|| Error::Config("predict.n: give --n or a graph".into()))?;
            let s = cfg
                .predict
                .s
                .or(cfg.signal.map(|s| s.s))
                .ok_or_else(|| Error::Config("predict.s: give --s or a signal".into()))?;
            let family = cfg.graph.map(|g| g.family).unwrap_or(GraphFamily::Complete);
            let p = predicted_boundary(cfg.beta, n, s, &family, cfg.regime);
            let mut text = format!("regime {}\n", p.regime.id());
            match p.rate {
                Some(r) => text.push_str(&format!("rate {}\n", sig3(r))),
                None => text.push_str("rate none\n"),
            }
            text.push_str(&serde_json::to_string(&p)?);
            with_output(cfg.out.as_deref(), stdout, |w| Ok(writeln!(w, "{text}")?))?;
        }
    }
    Ok(true)
}

/// Parses `args`, resolves the config, echoes it on stderr and runs the subcommand.
pub fn execute(cli: &Cli, env_threads: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let cfg = resolve_config(cli, env_threads)?;
    writeln!(stderr, "# seed {}", cfg.seed)?;
    writeln!(stderr, "# resolved config\n{}", cfg.to_json())?;
    if let Some(t) = cfg.threads {
        // Fails only if a pool already exists, in which case that pool is used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    run(&cli.command, &cfg, stdout, stderr)
}

/// Entry point of the `ising-scan` binary.
pub fn main_from_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let env_threads = std::env::var(THREADS_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(&cli, env_threads.as_deref(), &mut stdout.lock(), &mut stderr.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ising-scan").chain(args.iter().copied())).unwrap()
    }

    fn run_cli(args: &[&str]) -> Result<(bool, String)> {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let ok = execute(&cli(args), None, &mut out, &mut err)?;
        Ok((ok, String::from_utf8(out).unwrap()))
    }

    #[test]
    fn minimal_config_echoes_defaults() {
        let cfg = parse_config(r#"{"graph": {"family": {"kind": "complete"}, "n": 10}, "seed": 3}"#).unwrap();
        assert_eq!(cfg.beta, 0.0);
        assert_eq!(cfg.test, TestSpec::conditional_scan(0.1));
        assert_eq!(cfg.chain.seed, 3);
        assert_eq!(cfg.oracle.instances, 500);
        let echoed = cfg.to_json();
        for key in ["\"beta\"", "\"test\"", "\"chain\"", "\"oracle\"", "\"regime\"", "\"burn_in\""] {
            assert!(echoed.contains(key), "{key} missing from {echoed}");
        }
        assert_eq!(parse_config(&echoed).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config(r#"{"seed": 1, "bta": 0.5}"#).unwrap_err().to_string();
        assert!(err.contains("bta"), "{err}");
        let err = parse_config(r#"{"seed": 1, "graph": {"family": {"kind": "complete"}, "n": 4, "sead": 2}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("sead") && err.contains("graph"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn missing_seed_is_an_error() {
        let err = parse_config(r#"{"beta": 0.5}"#).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn inconsistent_dimensions_are_rejected() {
        let lattice =
            r#"{"seed": 1, "graph": {"family": {"kind": "lattice", "dim": 2, "side": 4, "range": 1}, "n": 15}}"#;
        assert!(parse_config(lattice).unwrap_err().to_string().contains("graph"));
        let big = r#"{"seed": 1, "graph": {"family": {"kind": "complete"}, "n": 10}, "signal": {"s": 4, "count": 3}}"#;
        assert!(parse_config(big).unwrap_err().to_string().contains("signal"));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 1, "beta": 0.2, "threads": 3}"#).unwrap();
        let p = path.to_str().unwrap();
        let c =
            resolve_config(&cli(&["--config", p, "--seed", "9", "predict", "--n", "100", "--s", "50"]), None).unwrap();
        assert_eq!((c.seed, c.beta, c.threads), (9, 0.2, Some(3)));
        let c = resolve_config(&cli(&["--config", p, "predict", "--beta", "1.5"]), Some("2")).unwrap();
        assert_eq!((c.seed, c.beta, c.threads), (1, 1.5, Some(2)));
        assert!(resolve_config(&cli(&["graph"]), None).is_err());
    }

    #[test]
    fn predict_critical_example() {
        let (ok, out) = run_cli(&["predict", "--beta", "1", "--n", "1000000", "--s", "10000"]).unwrap();
        assert!(ok);
        assert!(out.contains("rate_n_quarter_over_s"), "{out}");
        assert!(out.contains("rate 0.00316"), "{out}");
    }

    #[test]
    fn oracle_verify_has_no_violations() {
        let (ok, out) = run_cli(&["oracle", "verify", "--instances", "50", "--seed", "7"]).unwrap();
        assert!(ok);
        let report: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(report["total_violations"], 0);
        assert_eq!(report["instances"], 50);
    }

    #[test]
    fn sweep_rerun_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("sweep.json");
        std::fs::write(
            &cfg,
            r#"{"seed": 5, "graph": {"family": {"kind": "complete"}, "n": 12},
                "sweep": {"betas": [0.5], "s_values": [3], "signal": {"tanh_a": [0.3, 0.8]},
                          "tests": [{"kind": "naive_scan", "eta": 0.5}], "class": {"count": 4}, "replicates": 100}}"#,
        )
        .unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        for out in [&a, &b] {
            run_cli(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "sweep"]).unwrap();
        }
        let text = std::fs::read(&a).unwrap();
        assert_eq!(text, std::fs::read(&b).unwrap());
        assert_eq!(String::from_utf8(text).unwrap().lines().count(), 3);
    }

    #[test]
    fn graph_sample_and_test_subcommands() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::write(
            &cfg,
            r#"{"seed": 2, "beta": 0.5, "graph": {"family": {"kind": "regular_circulant", "d": 2}, "n": 12},
                "signal": {"s": 3, "count": 4, "tanh_a": 0.9}, "chain": {"num_samples": 5}}"#,
        )
        .unwrap();
        let c = cfg.to_str().unwrap();
        let (_, edges) = run_cli(&["--config", c, "graph"]).unwrap();
        assert_eq!(edges.lines().filter(|l| !l.starts_with('#')).count(), 13);
        let (_, dump) = run_cli(&["--config", c, "sample"]).unwrap();
        assert_eq!(dump.lines().next().unwrap(), "12 5 2");
        assert_eq!(dump.lines().count(), 6);
        let (_, result) = run_cli(&["--config", c, "test"]).unwrap();
        assert!(result.contains("\"kind\":\"conditional_scan\""), "{result}");
        let (_, m) = run_cli(&["--config", c, "oracle", "second-moment"]).unwrap();
        assert!(m.contains("\"value\""), "{m}");
        let (_, fp) = run_cli(&["oracle", "fixed-point", "--beta", "1.5"]).unwrap();
        assert!(fp.contains("\"regime\":\"low\""), "{fp}");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig3(0.0031622776), "0.00316");
        assert_eq!(sig3(0.03717), "0.0372");
        assert_eq!(sig3(12.345), "12.3");
    }
}
