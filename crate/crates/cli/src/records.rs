//! Output records for `gen`.

use std::io::Write;

use anyhow::Result;
use collatz_stairs::{StairTerm, Status};
use serde::Serialize;

/// One candidate, one line. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    /// Decimal value; the unreduced fraction when it is not an integer.
    pub value: String,
    pub k: u32,
    pub j: u32,
    pub q: u32,
    pub bvc: String,
    pub status: &'static str,
    pub reason: Option<String>,
}

impl Record {
    pub fn from_term(term: &StairTerm) -> Self {
        let (status, reason) = match term.status {
            Status::Accepted => ("accepted", None),
            Status::Rejected(r) => ("rejected", Some(r.to_string())),
        };
        Record {
            value: term.value.as_ref().map_or_else(|| term.fraction(), ToString::to_string),
            k: term.expr.k,
            j: term.expr.j,
            q: term.expr.q,
            bvc: term.bvc.to_string(),
            status,
            reason,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

pub fn write_records<W: Write>(out: W, format: Format, records: &[Record]) -> Result<()> {
    match format {
        Format::Jsonl => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
