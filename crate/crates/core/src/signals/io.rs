use std::io::{BufRead, Write};

use super::SignalClass;
use crate::error::{Error, Result};

/// Header `n s count`, where `s` is the realised set size, then one set per line.
pub fn write_class(class: &SignalClass, mut out: impl Write) -> Result<()> {
    writeln!(out, "{} {} {}", class.n(), class.set_size(), class.len())?;
    for set in class.sets() {
        let line: Vec<String> = set.iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_class(input: impl BufRead) -> Result<SignalClass> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut sets = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let nums = text
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
        match header {
            None => {
                if nums.len() != 3 {
                    return Err(Error::Parse { line: idx + 1, msg: "header must be `n s count`".into() });
                }
                header = Some((nums[0], nums[1], nums[2]));
            }
            Some((_, s, _)) => {
                if nums.len() != s {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("expected {s} indices, got {}", nums.len()),
                    });
                }
                sets.push(nums);
            }
        }
    }
    let (n, _, count) = header.ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    if sets.len() != count {
        return Err(Error::Parse {
            line: sets.len() + 2,
            msg: format!("header promises {count} sets, found {}", sets.len()),
        });
    }
    SignalClass::new(n, sets)
}
