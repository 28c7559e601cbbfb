//! Ideals on ℕ as verdict oracles.
//!
//! Membership of an infinite set in Fin or in the density ideal cannot be
//! decided from finite data. What can be observed is whether the exceedance
//! set `{l : ‖Σ_{i≤l}‖ > M}` swallows whole intervals `[n_k, n_{k+1})` of a
//! Talagrand sequence; no member of a Baire ideal contains infinitely many
//! of them, so many contained intervals are evidence of I-unboundedness.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{partial_sums, IndexerStem, PartialSumTrace, SeriesOracle};

/// Margin applied to every strict inequality `> M`.
pub const STRICT_MARGIN: f64 = 1e-9;

/// Contained intervals needed before a verdict reports I-unboundedness.
pub const DEFAULT_EVIDENCE_THRESHOLD: usize = 3;

/// A strictly increasing sequence n₁ < n₂ < … of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TalagrandSequence {
    /// n_k = k: singleton intervals, the sequence for Fin.
    Linear,
    /// n_k = 2^k: the sequence for the density ideal.
    Geometric,
    /// An explicit finite prefix; intervals past it are unavailable.
    Given(Vec<usize>),
}

impl TalagrandSequence {
    pub fn given(points: Vec<usize>) -> Result<Self> {
        if points.first() == Some(&0) || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStem(
                "a Talagrand sequence is a strictly increasing sequence of positive integers".into(),
            ));
        }
        Ok(TalagrandSequence::Given(points))
    }

    /// n_k, or `None` when k = 0 or the value is not available.
    pub fn point(&self, k: usize) -> Option<usize> {
        if k == 0 {
            return None;
        }
        match self {
            TalagrandSequence::Linear => Some(k),
            TalagrandSequence::Geometric => (k < usize::BITS as usize).then(|| 1usize << k),
            TalagrandSequence::Given(points) => points.get(k - 1).copied(),
        }
    }

    /// I_k = [n_k, n_{k+1}).
    pub fn interval(&self, k: usize) -> Result<Range<usize>> {
        match (self.point(k), self.point(k + 1)) {
            (Some(a), Some(b)) => Ok(a..b),
            _ => Err(Error::Unsupported(format!("interval I_{k} is not available"))),
        }
    }

    /// Smallest k with n_k > `bound`.
    pub fn first_point_above(&self, bound: usize) -> Option<usize> {
        (1..).map_while(|k| self.point(k).map(|n| (k, n))).find(|&(_, n)| n > bound).map(|(k, _)| k)
    }
}

impl fmt::Display for TalagrandSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TalagrandSequence::Linear => write!(f, "n_k = k"),
            TalagrandSequence::Geometric => write!(f, "n_k = 2^k"),
            TalagrandSequence::Given(p) => write!(f, "n_k given ({} points)", p.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealSpec {
    Fin,
    Density,
    TalagrandGiven(TalagrandSequence),
}

impl IdealSpec {
    /// Whether a finite set belongs to the ideal. Every ideal here
    /// contains Fin, so the answer is always yes.
    pub fn contains_finite(&self, _set: &BTreeSet<usize>) -> bool {
        true
    }

    /// The interval sequence used for verdicts.
    pub fn talagrand(&self) -> TalagrandSequence {
        match self {
            IdealSpec::TalagrandGiven(seq) => seq.clone(),
            _ => default_talagrand(self).expect("fin and density have defaults"),
        }
    }
}

pub fn interval(seq: &TalagrandSequence, k: usize) -> Result<Range<usize>> {
    seq.interval(k)
}

/// n_k = k for Fin and n_k = 2^k for the density ideal.
pub fn default_talagrand(ideal: &IdealSpec) -> Result<TalagrandSequence> {
    match ideal {
        IdealSpec::Fin => Ok(TalagrandSequence::Linear),
        IdealSpec::Density => Ok(TalagrandSequence::Geometric),
        IdealSpec::TalagrandGiven(_) => Err(Error::Unsupported(
            "a talagrand-given ideal already carries its sequence".into(),
        )),
    }
}

/// card(set ∩ {1,…,n}) / n.
pub fn density_at(set: &BTreeSet<usize>, n: usize) -> f64 {
    assert!(n >= 1, "density is evaluated at n >= 1");
    set.range(1..=n).count() as f64 / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceReport {
    pub bound: f64,
    pub horizon: usize,
    pub exceed_set: BTreeSet<usize>,
    pub contained_intervals: Vec<usize>,
}

pub fn exceedance_report(trace: &PartialSumTrace, bound: f64, seq: &TalagrandSequence) -> Result<ExceedanceReport> {
    for (i, &(l, _)) in trace.checkpoints.iter().enumerate() {
        if l != i + 1 {
            return Err(Error::GapInTrace(i + 1));
        }
    }
    let horizon = trace.horizon();
    let exceed_set: BTreeSet<usize> = trace
        .checkpoints
        .iter()
        .filter(|&&(_, v)| v > bound + STRICT_MARGIN)
        .map(|&(l, _)| l)
        .collect();
    let mut contained_intervals = Vec::new();
    for k in 1.. {
        let Ok(range) = seq.interval(k) else { break };
        if range.end - 1 > horizon {
            break;
        }
        if range.clone().all(|l| exceed_set.contains(&l)) {
            contained_intervals.push(k);
        }
    }
    Ok(ExceedanceReport { bound, horizon, exceed_set, contained_intervals })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// No partial sum up to the horizon exceeds M.
    BoundedEvidence { bound: f64 },
    /// At least `threshold` intervals I_k lie inside the exceedance set.
    IUnboundedEvidence { bound: f64, interval_count: usize },
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessVerdict {
    pub verdict: Verdict,
    pub horizon: usize,
}

pub fn i_bounded_verdict(
    series: &SeriesOracle,
    indexer: &IndexerStem,
    ideal: &IdealSpec,
    bound: f64,
    horizon: usize,
) -> Result<BoundednessVerdict> {
    i_bounded_verdict_with_threshold(series, indexer, ideal, bound, horizon, DEFAULT_EVIDENCE_THRESHOLD)
}

pub fn i_bounded_verdict_with_threshold(
    series: &SeriesOracle,
    indexer: &IndexerStem,
    ideal: &IdealSpec,
    bound: f64,
    horizon: usize,
    threshold: usize,
) -> Result<BoundednessVerdict> {
    let trace = partial_sums(series, indexer, horizon)?;
    let report = exceedance_report(&trace, bound, &ideal.talagrand())?;
    let count = report.contained_intervals.len();
    let verdict = if report.exceed_set.is_empty() {
        Verdict::BoundedEvidence { bound }
    } else if count >= threshold {
        Verdict::IUnboundedEvidence { bound, interval_count: count }
    } else {
        Verdict::Undecided
    };
    Ok(BoundednessVerdict { verdict, horizon })
}
