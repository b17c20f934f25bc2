//! Trace CSV emission and parsing. One row per proposal, `\n` line endings,
//! floats printed with 17 significant digits so a parsed trace reproduces
//! the run bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nrep_core::anneal::TraceRecord;
use nrep_core::{Error, Result};

pub const TRACE_HEADER: &str =
    "iter,proposed_op,proposed_theta,candidate_D,accepted,current_D,T,theta_max";

pub fn trace_to_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(24 + records.len() * 120);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            r.iteration,
            r.proposed_op,
            r.proposed_theta,
            r.candidate_distance,
            r.accepted,
            r.current_distance,
            r.temperature,
            r.theta_max,
        );
    }
    out
}

pub fn write_trace(records: &[TraceRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, trace_to_csv(records))?;
    Ok(())
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty trace file"))?;
    if header != TRACE_HEADER {
        return Err(Error::parse(1, format!("bad trace header '{header}'")));
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::parse(
                line_no,
                format!("expected 8 fields, got {}", fields.len()),
            ));
        }
        let int = |i: usize| -> Result<usize> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad integer '{}'", fields[i])))
        };
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad number '{}'", fields[i])))
        };
        let accepted = match fields[4] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::parse(line_no, format!("bad accepted flag '{other}'")));
            }
        };
        records.push(TraceRecord {
            iteration: int(0)?,
            proposed_op: int(1)?,
            proposed_theta: num(2)?,
            candidate_distance: num(3)?,
            accepted,
            current_distance: num(5)?,
            temperature: num(6)?,
            theta_max: num(7)?,
        });
    }
    Ok(records)
}
