//! The curve record: one rank-0 elliptic curve with the arithmetic
//! data the conditional-correlation analyses consume, plus JSONL
//! (optionally gzip-compressed) serialization.
//!
//! Serialization is byte-deterministic: the a_p map is a `BTreeMap`
//! (ascending prime order), floats print in shortest-round-trip form,
//! and records are written one JSON object per line in input order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::wmodel::{invariants, AInvs};
use crate::error::Error;
use crate::Result;

/// One curve with its analysis inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    /// Stable identifier, e.g. "389.1".
    pub label: String,
    pub conductor: u64,
    /// `[a1, a2, a3, a4, a6]` of a (globally minimal) integral model.
    pub ainvs: AInvs,
    /// Analytic rank (0 throughout the shipped fixture).
    pub rank: u32,
    /// Trace of Frobenius for every prime in the stored range.
    pub ap: BTreeMap<u64, i64>,
    /// Real period of the minimal model over the full real locus.
    pub omega: f64,
    /// Product of the local Tamagawa numbers.
    pub tamagawa_product: u64,
    /// Analytic order of the Tate–Shafarevich group (integer by BSD).
    pub sha: u64,
    /// Order of the rational torsion subgroup.
    pub torsion: u64,
    /// Central L-value L(E, 1).
    pub l1: f64,
}

impl CurveRecord {
    /// Structural validation: invariants that any well-formed record
    /// must satisfy regardless of provenance.
    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() {
            return Err(Error::validation("record has an empty label"));
        }
        if self.conductor == 0 {
            return Err(Error::validation("conductor must be positive"));
        }
        let inv = invariants(&self.ainvs)?;
        if inv.disc == 0 {
            return Err(Error::validation("singular model (Δ = 0)"));
        }
        if self.ap.is_empty() {
            return Err(Error::validation("empty a_p table"));
        }
        for (&p, &t) in &self.ap {
            if !crate::primes::is_prime(p) {
                return Err(Error::validation(format!("a_p key {p} is not prime")));
            }
            if self.conductor % p == 0 {
                if !(-1..=1).contains(&t) {
                    return Err(Error::validation(format!(
                        "bad-prime trace a_{p} = {t} outside {{−1, 0, 1}}"
                    )));
                }
            } else if (t as f64).powi(2) > 4.0 * p as f64 {
                return Err(Error::validation(format!(
                    "good-prime trace a_{p} = {t} violates the Hasse bound"
                )));
            }
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::validation("real period must be positive"));
        }
        if self.tamagawa_product == 0 {
            return Err(Error::validation("Tamagawa product must be positive"));
        }
        if self.sha == 0 {
            return Err(Error::validation("sha must be a positive integer"));
        }
        if ![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 16].contains(&self.torsion) {
            return Err(Error::validation(format!(
                "torsion order {} is not an allowed group order",
                self.torsion
            )));
        }
        if !self.l1.is_finite() {
            return Err(Error::validation("l1 must be finite"));
        }
        if self.rank == 0 && self.l1 <= 0.0 {
            return Err(Error::validation("rank-0 record with non-positive L(1)"));
        }
        Ok(())
    }
}

/// Outcome of reading a record stream: parsed rows plus per-line
/// diagnostics for the rows that were skipped.
#[derive(Debug, Default)]
pub struct IngestReport {
    /// (1-based line number, reason) for every rejected line.
    pub rejected: Vec<(usize, String)>,
    /// Set when the input contained no records at all.
    pub empty_input: bool,
}

impl IngestReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .rejected
            .iter()
            .map(|(line, why)| format!("line {line}: {why}"))
            .collect();
        if self.empty_input {
            out.push("input contained no records".to_string());
        }
        out
    }
}

fn open_maybe_gz(path: &Path) -> Result<Box<dyn Read>> {
    let f = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(flate2::read::GzDecoder::new(f)))
    } else {
        Ok(Box::new(f))
    }
}

/// Read curve records from a JSONL file (gzip-decoded when the path
/// ends in `.gz`). Malformed or invalid lines are skipped and reported
/// with their line numbers; parsing always continues.
pub fn read_jsonl(path: &Path) -> Result<(Vec<CurveRecord>, IngestReport)> {
    let reader = BufReader::new(open_maybe_gz(path)?);
    let mut records = Vec::new();
    let mut report = IngestReport::default();
    let mut lines = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        lines += 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CurveRecord>(&line) {
            Ok(rec) => match rec.validate() {
                Ok(()) => records.push(rec),
                Err(e) => report.rejected.push((idx + 1, e.to_string())),
            },
            Err(e) => report.rejected.push((idx + 1, format!("parse error: {e}"))),
        }
    }
    if lines == 0 || (records.is_empty() && report.rejected.is_empty()) {
        report.empty_input = true;
    }
    Ok((records, report))
}

/// Write curve records as JSONL (gzip-encoded when the path ends in
/// `.gz`). Output bytes are a pure function of the record sequence.
pub fn write_jsonl(path: &Path, records: &[CurveRecord]) -> Result<()> {
    let f = File::create(path)?;
    let mut w: Box<dyn Write> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufWriter::new(flate2::write::GzEncoder::new(
            f,
            flate2::Compression::new(6),
        )))
    } else {
        Box::new(BufWriter::new(f))
    };
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
