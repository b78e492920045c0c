//! Plain-text edge lists: a header `n m`, then one `i j` pair per line (0-based).

use std::io::{BufRead, Write};

use super::AdjacencyMatrix;
use crate::error::{Error, Result};

pub fn write_edge_list(adj: &AdjacencyMatrix, mut out: impl Write) -> Result<()> {
    writeln!(out, "{} {}", adj.n(), adj.num_edges())?;
    for (i, j) in adj.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse { line: lineno, msg: "expected two integers".into() })?
            .parse()
            .map_err(|e| Error::Parse { line: lineno, msg: format!("{e}") })
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
    }
    Ok(pair)
}

/// Reads an edge list, rejecting self-loops, repeated edges (in either
/// orientation), out-of-range vertices and an edge count that disagrees with
/// the header.
pub fn read_edge_list(input: impl BufRead) -> Result<AdjacencyMatrix> {
    let mut lines = input.lines().enumerate().filter_map(|(k, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((k + 1, other)),
    });
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let (n, m) = parse_pair(&header?, hline)?;
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let (i, j) = parse_pair(&line?, lineno)?;
        if i >= n || j >= n {
            return Err(Error::Parse { line: lineno, msg: format!("vertex out of range for n = {n}") });
        }
        if i == j {
            return Err(Error::Parse { line: lineno, msg: format!("self-loop at {i}") });
        }
        edges.push((i, j));
    }
    if edges.len() != m {
        return Err(Error::Parse { line: hline, msg: format!("header declares {m} edges, found {}", edges.len()) });
    }
    AdjacencyMatrix::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_lattice, build_random_regular};

    #[test]
    fn round_trip() {
        let g = build_random_regular(20, 3, 2).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(&buf[..]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), back.edges().collect::<Vec<_>>());
        let p = build_lattice(1, 4, 1).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "4 3\n0 1\n1 2\n2 3\n");
    }

    #[test]
    fn rejects_bad_files() {
        assert!(read_edge_list("3 1\n1 1\n".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1\n1 0\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 5\n".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 x\n".as_bytes()).is_err());
    }
}
