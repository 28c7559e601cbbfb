use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ideals::{TalagrandSequence, STRICT_MARGIN};
use crate::series::{for_each_partial_sum, is_prefix_bijection, IndexerStem, SeriesOracle};

use super::growth::Strategy;

/// Recorded and recomputed norms must agree to this relative tolerance.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// norm > bound, checked as norm > bound + δ
    Gt,
    /// norm ≥ bound − δ
    Ge,
    /// norm ≤ bound + δ
    Le,
}

impl Relation {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Relation::Gt => value > bound + STRICT_MARGIN,
            Relation::Ge => value >= bound - STRICT_MARGIN,
            Relation::Le => value <= bound + STRICT_MARGIN,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }
}

/// What a checkpoint measures at stem position `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// ‖Σ_{i≤l} summand(i)‖
    PartialSum,
    /// ‖summand(l)‖
    Term,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub quantity: Quantity,
    pub l: usize,
    pub norm: f64,
    pub bound: f64,
    pub relation: Relation,
}

impl Checkpoint {
    pub fn partial_sum(l: usize, norm: f64, bound: f64, relation: Relation) -> Self {
        Checkpoint { quantity: Quantity::PartialSum, l, norm, bound, relation }
    }

    pub fn term(l: usize, norm: f64, bound: f64, relation: Relation) -> Self {
        Checkpoint { quantity: Quantity::Term, l, norm, bound, relation }
    }

    pub fn satisfied(&self) -> bool {
        self.relation.holds(self.norm, self.bound)
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.quantity {
            Quantity::PartialSum => "partial sum",
            Quantity::Term => "term",
        };
        write!(f, "{what} at l = {}: {} {} {}", self.l, self.norm, self.relation.symbol(), self.bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    GrowSubseries,
    SubseriesToRearrangement,
    NowhereDenseSubseq,
    NowhereDenseRearr,
    DenseOpenBm,
    DenseOpenCm,
    DenseOpenAm,
    LimsupSubseries,
    /// Growth levels read off a caller-supplied stem.
    Observed,
}

/// Claim that every j ∈ I_k carries a partial-sum checkpoint `> bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalClaim {
    pub k: usize,
    pub sequence: TalagrandSequence,
    pub bound: f64,
}

/// A finite stem plus the inequalities it was built to satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub construction: Construction,
    pub stem: IndexerStem,
    pub checkpoints: Vec<Checkpoint>,
    pub interval: Option<IntervalClaim>,
    /// Lengths at which a rearrangement stem is a bijection of {1,…,k}.
    pub stages: Vec<usize>,
    /// Growth strategy that produced (and may continue) the stem.
    pub strategy: Option<Strategy>,
}

impl WitnessCertificate {
    pub(crate) fn new(construction: Construction, stem: IndexerStem) -> Self {
        WitnessCertificate {
            construction,
            stem,
            checkpoints: Vec::new(),
            interval: None,
            stages: Vec::new(),
            strategy: None,
        }
    }

    pub fn final_checkpoint(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateFault {
    #[error("checkpoint {index} ({quantity:?} at l = {l}) lies beyond the stem of length {len}")]
    OutOfRange { index: usize, quantity: Quantity, l: usize, len: usize },

    #[error("checkpoint {index} ({quantity:?} at l = {l}): recorded norm {recorded} but recomputed {recomputed}")]
    NormMismatch { index: usize, quantity: Quantity, l: usize, recorded: f64, recomputed: f64 },

    #[error("checkpoint {index} ({quantity:?} at l = {l}): {norm} {} {bound} fails", relation.symbol())]
    RelationFails { index: usize, quantity: Quantity, l: usize, norm: f64, bound: f64, relation: Relation },

    #[error("stem is not a bijection of {{1..{k}}} at recorded stage boundary {k}")]
    StageNotBijective { k: usize },

    #[error("interval I_{k} is not fully certified: position {missing} has no satisfied checkpoint")]
    IntervalIncomplete { k: usize, missing: usize },

    #[error("interval I_{k} is unavailable in the recorded sequence")]
    IntervalUnavailable { k: usize },
}

impl CertificateFault {
    /// Index of the offending checkpoint, when there is one.
    pub fn checkpoint_index(&self) -> Option<usize> {
        match self {
            CertificateFault::OutOfRange { index, .. }
            | CertificateFault::NormMismatch { index, .. }
            | CertificateFault::RelationFails { index, .. } => Some(*index),
            _ => None,
        }
    }
}

fn close(recorded: f64, recomputed: f64) -> bool {
    (recorded - recomputed).abs() <= NORM_TOLERANCE * recomputed.abs().max(1.0)
}

/// Recomputes `checkpoints` against `stem` in the order given and reports
/// the first one whose norm or relation fails.
pub fn verify_checkpoints(
    series: &SeriesOracle,
    stem: &IndexerStem,
    checkpoints: &[Checkpoint],
) -> Result<(), CertificateFault> {
    let mut wanted: BTreeMap<usize, f64> = BTreeMap::new();
    for (index, c) in checkpoints.iter().enumerate() {
        if c.l == 0 || c.l > stem.len() {
            return Err(CertificateFault::OutOfRange { index, quantity: c.quantity, l: c.l, len: stem.len() });
        }
        if c.quantity == Quantity::PartialSum {
            wanted.insert(c.l, f64::NAN);
        }
    }
    if let Some(&top) = wanted.keys().next_back() {
        for_each_partial_sum(series, stem, top, |l, v| {
            if let Some(slot) = wanted.get_mut(&l) {
                *slot = v;
            }
        })
        .expect("checkpoint positions were checked against the stem length");
    }
    for (index, c) in checkpoints.iter().enumerate() {
        let recomputed = match c.quantity {
            Quantity::PartialSum => wanted[&c.l],
            Quantity::Term => {
                let (n, coef) = stem.summand(c.l);
                coef.abs() * series.term_norm(n)
            }
        };
        if !close(c.norm, recomputed) {
            return Err(CertificateFault::NormMismatch {
                index,
                quantity: c.quantity,
                l: c.l,
                recorded: c.norm,
                recomputed,
            });
        }
        if !c.relation.holds(recomputed, c.bound) {
            return Err(CertificateFault::RelationFails {
                index,
                quantity: c.quantity,
                l: c.l,
                norm: recomputed,
                bound: c.bound,
                relation: c.relation,
            });
        }
    }
    Ok(())
}

/// Independent re-verification of a certificate from the series and stem.
pub fn verify_certificate(series: &SeriesOracle, cert: &WitnessCertificate) -> Result<(), CertificateFault> {
    verify_checkpoints(series, &cert.stem, &cert.checkpoints)?;
    if let IndexerStem::Rearrangement(r) = &cert.stem {
        for &k in &cert.stages {
            if k > r.len() || !is_prefix_bijection(&r.values()[..k]) {
                return Err(CertificateFault::StageNotBijective { k });
            }
        }
    } else if let Some(&k) = cert.stages.first() {
        return Err(CertificateFault::StageNotBijective { k });
    }
    if let Some(claim) = &cert.interval {
        let range = claim
            .sequence
            .interval(claim.k)
            .map_err(|_| CertificateFault::IntervalUnavailable { k: claim.k })?;
        for j in range {
            let covered = cert.checkpoints.iter().any(|c| {
                c.quantity == Quantity::PartialSum
                    && c.l == j
                    && c.bound >= claim.bound
                    && matches!(c.relation, Relation::Gt)
            });
            if !covered {
                return Err(CertificateFault::IntervalIncomplete { k: claim.k, missing: j });
            }
        }
    }
    Ok(())
}
