//! Plain-text sample dumps: header `n num_samples seed`, then one hex line per state.

use std::io::{BufRead, Write};

use super::SpinConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleDump {
    pub n: usize,
    pub seed: u64,
    pub samples: Vec<SpinConfig>,
}

pub fn write_samples(mut out: impl Write, n: usize, seed: u64, samples: &[SpinConfig]) -> Result<()> {
    writeln!(out, "{} {} {}", n, samples.len(), seed)?;
    for s in samples {
        if s.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s.n() });
        }
        writeln!(out, "{}", s.to_hex())?;
    }
    Ok(())
}

pub fn read_samples(input: impl BufRead) -> Result<SampleDump> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(t) if t.trim().is_empty()));
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_err = |msg: &str| Error::Parse { line: 1, msg: msg.into() };
    if fields.len() != 3 {
        return Err(parse_err("header must be `n num_samples seed`"));
    }
    let n: usize = fields[0].parse().map_err(|_| parse_err("bad n"))?;
    let count: usize = fields[1].parse().map_err(|_| parse_err("bad sample count"))?;
    let seed: u64 = fields[2].parse().map_err(|_| parse_err("bad seed"))?;
    let mut samples = Vec::with_capacity(count);
    for (idx, line) in lines {
        let line = line?;
        let config =
            SpinConfig::from_hex(n, line.trim()).map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
        samples.push(config);
    }
    if samples.len() != count {
        return Err(Error::Parse {
            line: samples.len() + 2,
            msg: format!("header promises {count} samples, found {}", samples.len()),
        });
    }
    Ok(SampleDump { n, seed, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let samples = vec![SpinConfig::from_spins(&[1, -1, 1, 1]), SpinConfig::from_spins(&[-1, -1, -1, -1])];
        let mut buf = Vec::new();
        write_samples(&mut buf, 4, 42, &samples).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "4 2 42\n0d\n00\n");
        let back = read_samples(&buf[..]).unwrap();
        assert_eq!(back, SampleDump { n: 4, seed: 42, samples });
    }

    #[test]
    fn count_mismatch_is_reported() {
        assert!(read_samples(&b"4 3 1\n0d\n"[..]).is_err());
        assert!(read_samples(&b"4 1\n0d\n"[..]).is_err());
    }
}
