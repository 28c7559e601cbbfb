//! Certificate documents, schema version 1.
//!
//! A document echoes the run configuration and carries the stem, the
//! checkpoints and the verdicts of a run; verifying it needs nothing but
//! the document and the catalog. Index stems are stored as arithmetic
//! runs `[start, step, count]` and selection words as `[bit, count]` runs.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use serieswit::ideals::{BoundednessVerdict, TalagrandSequence};
use serieswit::series::{IndexerStem, RearrStem, SelectionStem, SubseqStem};
use serieswit::witnesses::{Alphabet, Checkpoint, Construction, IntervalClaim, Strategy};

use crate::config::{IdealChoice, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EncodedStem {
    Selection { len: usize, runs: Vec<(u8, usize)> },
    Subsequence { len: usize, runs: Vec<(usize, i64, usize)> },
    Rearrangement { len: usize, runs: Vec<(usize, i64, usize)> },
}

fn arithmetic_runs(values: &[usize]) -> Vec<(usize, i64, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let start = values[i];
        let step = values.get(i + 1).map_or(0, |&v| v as i64 - start as i64);
        let mut count = 1;
        while i + count < values.len() && values[i + count] as i64 - values[i + count - 1] as i64 == step {
            count += 1;
        }
        runs.push((start, if count == 1 { 0 } else { step }, count));
        i += count;
    }
    runs
}

fn expand_runs(runs: &[(usize, i64, usize)], len: usize) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::with_capacity(len);
    for &(start, step, count) in runs {
        for j in 0..count {
            let v = start as i64 + step * j as i64;
            if v < 1 {
                return Err(CliError::Malformed(format!("stem run ({start}, {step}, {count}) leaves the positive integers")));
            }
            out.push(v as usize);
            if out.len() > len {
                return Err(CliError::Malformed(format!("stem runs exceed the declared length {len}")));
            }
        }
    }
    if out.len() != len {
        return Err(CliError::Malformed(format!("stem runs give {} entries, declared {len}", out.len())));
    }
    Ok(out)
}

impl EncodedStem {
    pub fn encode(stem: &IndexerStem) -> Self {
        match stem {
            IndexerStem::Selection(s) => {
                let mut runs: Vec<(u8, usize)> = Vec::new();
                for &b in s.bits() {
                    match runs.last_mut() {
                        Some((bit, count)) if *bit == b as u8 => *count += 1,
                        _ => runs.push((b as u8, 1)),
                    }
                }
                EncodedStem::Selection { len: s.len(), runs }
            }
            IndexerStem::Subsequence(s) => EncodedStem::Subsequence { len: s.len(), runs: arithmetic_runs(s.indices()) },
            IndexerStem::Rearrangement(r) => {
                EncodedStem::Rearrangement { len: r.len(), runs: arithmetic_runs(r.values()) }
            }
        }
    }

    pub fn decode(&self) -> Result<IndexerStem, CliError> {
        Ok(match self {
            EncodedStem::Selection { len, runs } => {
                let mut bits = Vec::with_capacity(*len);
                for &(bit, count) in runs {
                    if bit > 1 {
                        return Err(CliError::Malformed(format!("selection run with bit {bit}")));
                    }
                    if bits.len() + count > *len {
                        return Err(CliError::Malformed(format!("stem runs exceed the declared length {len}")));
                    }
                    bits.extend(std::iter::repeat_n(bit == 1, count));
                }
                if bits.len() != *len {
                    return Err(CliError::Malformed(format!("stem runs give {} entries, declared {len}", bits.len())));
                }
                SelectionStem::new(bits).into()
            }
            EncodedStem::Subsequence { len, runs } => SubseqStem::new(expand_runs(runs, *len)?)?.into(),
            EncodedStem::Rearrangement { len, runs } => RearrStem::new(expand_runs(runs, *len)?)?.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DocVerdict {
    /// The stem satisfies every checkpoint; `claim` says what that proves.
    Certified { claim: String },
    /// The search ran past its horizon. On uniformly bounded series this is
    /// the expected outcome.
    Exhausted { strategy: Option<Strategy>, detail: String },
    UniformBound { n: usize, alphabet: Alphabet, value: f64 },
    IBounded {
        ideal: IdealChoice,
        sequence: TalagrandSequence,
        outcome: BoundednessVerdict,
        contained_intervals: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema_version: String,
    pub config: RunConfig,
    pub construction: Option<Construction>,
    pub stem: Option<EncodedStem>,
    pub checkpoints: Vec<Checkpoint>,
    pub interval: Option<IntervalClaim>,
    pub stages: Vec<usize>,
    pub strategy: Option<Strategy>,
    pub verdicts: Vec<DocVerdict>,
    pub self_verified: bool,
    pub timing: Timing,
}

impl CertificateDocument {
    pub fn new(config: RunConfig) -> Self {
        CertificateDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            config,
            construction: None,
            stem: None,
            checkpoints: Vec::new(),
            interval: None,
            stages: Vec::new(),
            strategy: None,
            verdicts: Vec::new(),
            self_verified: false,
            timing: Timing::default(),
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.verdicts.iter().any(|v| matches!(v, DocVerdict::Exhausted { .. }))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// Parses a document, rejecting other schema versions before looking
    /// at the payload.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text)?;
        match value.get("schema_version").and_then(Value::as_str) {
            Some(SCHEMA_VERSION) => Ok(serde_json::from_value(value)?),
            found => Err(CliError::SchemaMismatch { found: found.unwrap_or("<missing>").to_string() }),
        }
    }
}
