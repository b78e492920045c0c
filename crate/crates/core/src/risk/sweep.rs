//! Grid sweeps over `(β, s, A, test)` with crash-safe CSV output.

use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{estimate_risk, RiskOptions};
use crate::detect::TestSpec;
use crate::error::{Error, Result};
use crate::graphs::{CouplingMatrix, GraphFamily, GraphSpec};
use crate::model::{ModelParams, SamplerChoice, SamplerConfig};
use crate::rng::derive_seed;
use crate::signals::{make_lattice_cube_class, make_mean_field_class, AlternativeSpec, SignalClass};

pub const CSV_HEADER: &str = "graph,n,beta,s,A,tanhA,test,type1,type1_se,type2,type2_se,risk,replicates,seed";

/// Minimum replicates per cell.
pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisA {
    A(Vec<f64>),
    TanhA(Vec<f64>),
}

impl AxisA {
    fn values(&self) -> Result<Vec<(f64, f64)>> {
        match self {
            AxisA::A(v) => {
                v.iter().map(|&a| if a > 0.0 && a.is_finite() { Ok((a, a.tanh())) } else { Err(bad_a(a)) }).collect()
            }
            AxisA::TanhA(v) => {
                v.iter().map(|&t| if t > 0.0 && t < 1.0 { Ok((t.atanh(), t)) } else { Err(bad_a(t)) }).collect()
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            AxisA::A(v) | AxisA::TanhA(v) => v.len(),
        }
    }
}

fn bad_a(v: f64) -> Error {
    Error::InvalidParameter(format!("signal axis value {v} out of range"))
}

/// How the signal class of each cell is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRule {
    /// Number of disjoint consecutive blocks (mean-field families). Lattice
    /// families use every cube of the requested size.
    pub count: usize,
}

impl ClassRule {
    fn build(&self, graph: &GraphSpec, s: usize) -> Result<SignalClass> {
        match graph.family {
            GraphFamily::Lattice { dim, side, .. } => make_lattice_cube_class(dim, side, s),
            _ => make_mean_field_class(graph.n, s, self.count, true, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub graph: GraphSpec,
    pub betas: Vec<f64>,
    pub s_values: Vec<usize>,
    pub signal: AxisA,
    pub tests: Vec<TestSpec>,
    pub class: ClassRule,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerChoice,
    #[serde(default)]
    pub chain: SamplerConfig,
    #[serde(default)]
    pub exhaustive: bool,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty() || self.s_values.is_empty() || self.signal.len() == 0 || self.tests.is_empty() {
            return Err(Error::Config("sweep axes must be nonempty".into()));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(Error::Config(format!("sweeps need at least {MIN_REPLICATES} replicates per cell")));
        }
        self.graph.validate()?;
        self.signal.values()?;
        for t in &self.tests {
            t.validate()?;
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.betas.len() * self.s_values.len() * self.signal.len() * self.tests.len()
    }
}

/// One cell of a sweep; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRecord {
    pub graph: String,
    pub n: usize,
    pub beta: f64,
    pub s: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "tanhA")]
    pub tanh_a: f64,
    pub test: String,
    pub type1: f64,
    pub type1_se: f64,
    pub type2: f64,
    pub type2_se: f64,
    pub risk: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl RiskRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serialises")
    }
}

struct Cell {
    beta: f64,
    s: usize,
    a: f64,
    tanh_a: f64,
    test: TestSpec,
}

fn cells(grid: &SweepGrid) -> Result<Vec<Cell>> {
    let signal = grid.signal.values()?;
    let mut out = Vec::with_capacity(grid.cell_count());
    for &beta in &grid.betas {
        for &s in &grid.s_values {
            for &(a, tanh_a) in &signal {
                for test in &grid.tests {
                    out.push(Cell { beta, s, a, tanh_a, test: *test });
                }
            }
        }
    }
    Ok(out)
}

fn run_cell(grid: &SweepGrid, coupling: &Arc<CouplingMatrix>, id: usize, cell: &Cell) -> Result<RiskRecord> {
    let class = grid.class.build(&grid.graph, cell.s)?;
    let set_size = class.set_size();
    let alt = AlternativeSpec::new(class, cell.a)?;
    let null = ModelParams::null(cell.beta, Arc::clone(coupling));
    let seed = derive_seed(grid.seed, &[id as u64]);
    let opts = RiskOptions { seed, sampler: grid.sampler, chain: grid.chain, exhaustive: grid.exhaustive };
    let est = estimate_risk(&cell.test, &null, &alt, grid.replicates, &opts)?;
    Ok(RiskRecord {
        graph: grid.graph.id(),
        n: grid.graph.n,
        beta: cell.beta,
        s: set_size,
        a: cell.a,
        tanh_a: cell.tanh_a,
        test: cell.test.kind.id().to_string(),
        type1: est.type1,
        type1_se: est.type1_se,
        type2: est.type2,
        type2_se: est.type2_se,
        risk: est.risk,
        replicates: est.replicates,
        seed,
    })
}

fn sweep_from(grid: &SweepGrid, start: usize, mut sink: impl FnMut(RiskRecord) -> Result<()>) -> Result<()> {
    grid.validate()?;
    let coupling = Arc::new(grid.graph.coupling()?);
    for (id, cell) in cells(grid)?.iter().enumerate().skip(start) {
        let record = run_cell(grid, &coupling, id, cell).map_err(|e| Error::Cell { cell: id, source: Box::new(e) })?;
        sink(record).map_err(|e| Error::Cell { cell: id, source: Box::new(e) })?;
    }
    Ok(())
}

/// Every cell of the grid, in `(β, s, A, test)` order.
pub fn boundary_sweep(grid: &SweepGrid) -> Result<Vec<RiskRecord>> {
    let mut out = Vec::with_capacity(grid.cell_count());
    sweep_from(grid, 0, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<RiskRecord>> {
    let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse { line: 1, msg: format!("unexpected CSV header `{}`", header.join(",")) });
    }
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Runs the sweep appending one row per finished cell to `csv_path`.
///
/// Rows already present are kept and their cells skipped, so an interrupted
/// sweep resumes where it stopped. With `json_path`, a JSON-lines mirror of
/// all records is written at the end.
pub fn boundary_sweep_csv(grid: &SweepGrid, csv_path: &Path, json_path: Option<&Path>) -> Result<Vec<RiskRecord>> {
    let mut records = if csv_path.exists() && std::fs::metadata(csv_path)?.len() > 0 {
        read_records(csv_path)?
    } else {
        let mut f = File::create(csv_path)?;
        writeln!(f, "{CSV_HEADER}")?;
        Vec::new()
    };
    if records.len() > grid.cell_count() {
        return Err(Error::Config(format!(
            "{} holds {} rows but the grid has {} cells",
            csv_path.display(),
            records.len(),
            grid.cell_count()
        )));
    }
    let file = OpenOptions::new().append(true).open(csv_path)?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    sweep_from(grid, records.len(), |r| {
        writer.serialize(&r)?;
        writer.flush()?;
        records.push(r);
        Ok(())
    })?;
    if let Some(p) = json_path {
        let mut f = File::create(p)?;
        for r in &records {
            writeln!(f, "{}", r.to_json())?;
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(tanh: Vec<f64>) -> SweepGrid {
        SweepGrid {
            graph: GraphSpec::complete(60),
            betas: vec![0.5],
            s_values: vec![6],
            signal: AxisA::TanhA(tanh),
            tests: vec![TestSpec::naive_scan(0.1, 0.5)],
            class: ClassRule { count: 4 },
            replicates: 200,
            seed: 11,
            sampler: SamplerChoice::Auto,
            chain: SamplerConfig::default(),
            exhaustive: false,
        }
    }

    #[test]
    fn single_cell_gives_one_record() {
        let r = boundary_sweep(&grid(vec![0.3])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].graph, "complete-n60");
        assert_eq!(r[0].test, "naive_scan");
    }

    #[test]
    fn power_is_monotone_in_signal() {
        let r = boundary_sweep(&grid(vec![0.1, 0.3, 0.5, 0.7, 0.9])).unwrap();
        for w in r.windows(2) {
            let slack = 2.0 * (w[0].type2_se.powi(2) + w[1].type2_se.powi(2)).sqrt();
            assert!(1.0 - w[1].type2 >= 1.0 - w[0].type2 - slack);
        }
    }

    #[test]
    fn csv_is_reproducible_and_resumable() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(vec![0.2, 0.5, 0.8]);
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        boundary_sweep_csv(&g, &a, None).unwrap();
        boundary_sweep_csv(&g, &b, Some(&dir.path().join("b.jsonl"))).unwrap();
        let full = std::fs::read_to_string(&a).unwrap();
        assert_eq!(full, std::fs::read_to_string(&b).unwrap());
        assert!(full.starts_with(CSV_HEADER));
        assert_eq!(full.lines().count(), 4);

        // Truncate to header + one row and resume.
        let c = dir.path().join("c.csv");
        let partial: String = full.lines().take(2).map(|l| format!("{l}\n")).collect();
        std::fs::write(&c, partial).unwrap();
        boundary_sweep_csv(&g, &c, None).unwrap();
        assert_eq!(full, std::fs::read_to_string(&c).unwrap());
        assert_eq!(read_records(&c).unwrap(), boundary_sweep(&g).unwrap());
        assert_eq!(std::fs::read_to_string(dir.path().join("b.jsonl")).unwrap().lines().count(), 3);
    }

    #[test]
    fn validation() {
        let mut g = grid(vec![0.2]);
        g.replicates = 50;
        assert!(g.validate().is_err());
        let g = grid(vec![1.0]);
        assert!(g.validate().is_err());
        let mut g = grid(vec![0.2]);
        g.betas.clear();
        assert!(g.validate().is_err());
    }
}
