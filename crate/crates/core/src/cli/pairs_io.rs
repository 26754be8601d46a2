//! Pairs files: `# schema=1`, then `q1,c,j0,modulus,parity,algorithm,seed`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::congruence::Parity;
use crate::error::{invalid, Result};
use crate::generator::{validate_pair, CandidatePair};

pub const SCHEMA_LINE: &str = "# schema=1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRow {
    pub q1: u64,
    pub c: String,
    pub j0: u64,
    pub modulus: String,
    pub parity: String,
    pub algorithm: u8,
    /// Empty for the exhaustive algorithm.
    pub seed: String,
}

impl PairRow {
    pub fn new(pair: &CandidatePair, algorithm: u8, seed: Option<&num_bigint::BigInt>) -> Self {
        Self {
            q1: pair.q1,
            c: pair.c.to_string(),
            j0: pair.j0,
            modulus: pair.modulus.to_string(),
            parity: match pair.parity() {
                Parity::Even => "even",
                Parity::Odd => "odd",
            }
            .into(),
            algorithm,
            seed: seed.map(|s| s.to_string()).unwrap_or_default(),
        }
    }

    pub fn to_pair(&self) -> Result<CandidatePair> {
        let parse = |s: &str, what: &str| s.parse().or_else(|_| invalid(format!("bad {what} {s:?} in pairs file")));
        let pair = CandidatePair { c: parse(&self.c, "c")?, j0: self.j0, q1: self.q1, modulus: parse(&self.modulus, "modulus")? };
        let expected = match pair.parity() {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        if self.parity != expected {
            return invalid(format!("row for c={} says parity {} but c is {expected}", self.c, self.parity));
        }
        Ok(pair)
    }
}

/// Write `# schema=1` and then the rows as CSV.
pub fn write_csv<T: Serialize>(out: &mut dyn Write, rows: &[T], header: &[&str]) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a CSV written by [`write_csv`].
pub fn read_csv<T: for<'de> Deserialize<'de>>(input: &mut dyn BufRead) -> Result<Vec<T>> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return invalid(format!("expected {SCHEMA_LINE:?} as first line, got {:?}", first.trim_end()));
    }
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub const PAIR_HEADER: [&str; 7] = ["q1", "c", "j0", "modulus", "parity", "algorithm", "seed"];

/// Load a pairs file and validate every row.
pub fn load_pairs(input: &mut dyn BufRead) -> Result<Vec<(PairRow, CandidatePair)>> {
    let rows: Vec<PairRow> = read_csv(input)?;
    rows.into_iter()
        .map(|row| {
            let pair = row.to_pair()?;
            validate_pair(&pair)?;
            Ok((row, pair))
        })
        .collect()
}
