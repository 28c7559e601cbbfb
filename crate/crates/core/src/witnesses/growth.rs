//! Growth oracles and the doubling construction of an unbounded subseries.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{IndexerStem, RearrStem, SeriesOracle, SubseqStem};
use crate::spaces::RunningSum;

use super::certificate::{
    verify_checkpoints, Checkpoint, Construction, Quantity, Relation, WitnessCertificate,
};

/// Window searched by the exhaustive strategy.
pub const EXHAUSTIVE_WINDOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Collect positive terms of a scalar series.
    GreedyPositive,
    /// Collect negative terms of a scalar series.
    GreedyNegative,
    /// Collect same-signed terms of one coordinate at a time.
    PerCoordinate,
    /// Try every selection inside a window of [`EXHAUSTIVE_WINDOW`] indices.
    Exhaustive,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::GreedyPositive, Strategy::GreedyNegative, Strategy::PerCoordinate, Strategy::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::GreedyPositive => "greedy-positive",
            Strategy::GreedyNegative => "greedy-negative",
            Strategy::PerCoordinate => "per-coordinate",
            Strategy::Exhaustive => "exhaustive",
        }
    }

    pub fn applies_to(self, series: &SeriesOracle) -> bool {
        match self {
            Strategy::GreedyPositive | Strategy::GreedyNegative => series.space().is_scalar(),
            Strategy::PerCoordinate | Strategy::Exhaustive => true,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown growth strategy `{s}`")))
    }
}

/// A norm requirement `‖·‖ relation bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirement {
    pub bound: f64,
    pub relation: Relation,
}

impl Requirement {
    pub fn at_least(bound: f64) -> Self {
        Requirement { bound, relation: Relation::Ge }
    }

    pub fn above(bound: f64) -> Self {
        Requirement { bound, relation: Relation::Gt }
    }

    pub fn met(&self, norm: f64) -> bool {
        self.relation.holds(norm, self.bound)
    }
}

/// Searches for a finite increasing block of indices past a given index
/// whose contribution makes a norm requirement hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthOracle {
    pub strategy: Strategy,
}

impl GrowthOracle {
    pub fn new(strategy: Strategy) -> Self {
        GrowthOracle { strategy }
    }

    /// A block `after_index < j₁ < … ≤ search_horizon` with
    /// `‖Σ x_{jᵢ}‖ ≥ target`, or `None` when the search fails.
    pub fn find_block(
        &self,
        series: &SeriesOracle,
        after_index: usize,
        target: f64,
        search_horizon: usize,
    ) -> Result<Option<Vec<usize>>> {
        let base = RunningSum::new(*series.space());
        self.extend_block(series, &base, after_index, Requirement::at_least(target), search_horizon)
    }

    /// Like [`find_block`](Self::find_block) but the requirement applies to
    /// `base + Σ x_{jᵢ}`.
    pub fn extend_block(
        &self,
        series: &SeriesOracle,
        base: &RunningSum,
        after_index: usize,
        req: Requirement,
        search_horizon: usize,
    ) -> Result<Option<Vec<usize>>> {
        if !self.strategy.applies_to(series) {
            return Err(Error::StrategyNotApplicable {
                strategy: self.strategy.to_string(),
                space: series.space().to_string(),
            });
        }
        let from = after_index + 1;
        if from > search_horizon {
            return Ok(None);
        }
        Ok(match self.strategy {
            Strategy::GreedyPositive => greedy_sign(series, base, from, search_horizon, req, 1.0),
            Strategy::GreedyNegative => greedy_sign(series, base, from, search_horizon, req, -1.0),
            Strategy::PerCoordinate => per_coordinate(series, base, from, search_horizon, req),
            Strategy::Exhaustive => exhaustive(series, base, from, search_horizon.min(after_index + EXHAUSTIVE_WINDOW), req),
        })
    }
}

fn greedy_sign(
    series: &SeriesOracle,
    base: &RunningSum,
    from: usize,
    to: usize,
    req: Requirement,
    sign: f64,
) -> Option<Vec<usize>> {
    let mut acc = base.clone();
    let mut block = Vec::new();
    for n in from..=to {
        let x = series.scalar_term(n).expect("greedy strategies need a scalar series");
        if x * sign > 0.0 {
            series.add_term(&mut acc, n, 1.0);
            block.push(n);
            if req.met(acc.norm()) {
                return Some(block);
            }
        }
    }
    None
}

fn per_coordinate(
    series: &SeriesOracle,
    base: &RunningSum,
    from: usize,
    to: usize,
    req: Requirement,
) -> Option<Vec<usize>> {
    let mut coords = Vec::new();
    if series.space().is_scalar() {
        coords.push(1);
    } else {
        let mut seen = BTreeSet::new();
        for n in from..=to {
            let c = series.coordinate_of(n);
            if seen.insert(c) {
                coords.push(c);
            }
        }
    }
    for c in coords {
        let terms = series.coordinate_terms(c, from, to);
        for sign in [1.0, -1.0] {
            let mut acc = base.clone();
            let mut block = Vec::new();
            for &(n, coef) in &terms {
                if coef * sign > 0.0 {
                    series.add_term(&mut acc, n, 1.0);
                    block.push(n);
                    if req.met(acc.norm()) {
                        return Some(block);
                    }
                }
            }
        }
    }
    None
}

/// Walks every nonempty subset of `from..=to` in Gray-code order.
fn exhaustive(
    series: &SeriesOracle,
    base: &RunningSum,
    from: usize,
    to: usize,
    req: Requirement,
) -> Option<Vec<usize>> {
    let window: Vec<usize> = (from..=to).collect();
    let w = window.len();
    let mut acc = base.clone();
    let mut mask = 0u32;
    for step in 1u32..(1 << w) {
        let bit = step.trailing_zeros();
        mask ^= 1 << bit;
        let coef = if mask & (1 << bit) != 0 { 1.0 } else { -1.0 };
        series.add_term(&mut acc, window[bit as usize], coef);
        if req.met(acc.norm()) {
            return Some((0..w).filter(|i| mask & (1 << i) != 0).map(|i| window[i]).collect());
        }
    }
    None
}

/// An unbounded subseries: a certified finite stem, optionally continued
/// past its end by the growth strategy that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct UnboundedSubseq {
    pub stem: SubseqStem,
    pub checkpoints: Vec<Checkpoint>,
    pub continuation: Option<GrowthOracle>,
}

impl UnboundedSubseq {
    /// Takes the stem and checkpoints of a subsequence certificate; the
    /// recorded strategy, if any, continues it.
    pub fn from_certificate(cert: &WitnessCertificate) -> Result<Self> {
        match &cert.stem {
            IndexerStem::Subsequence(s) => Ok(UnboundedSubseq {
                stem: s.clone(),
                checkpoints: cert.checkpoints.clone(),
                continuation: cert.strategy.map(GrowthOracle::new),
            }),
            other => Err(Error::InvalidStem(format!("expected a subsequence stem, got {:?}", other.kind()))),
        }
    }

    pub(crate) fn check(&self, series: &SeriesOracle) -> Result<()> {
        verify_checkpoints(series, &self.stem.clone().into(), &self.checkpoints)
            .map_err(|f| Error::InconsistentWitness(f.to_string()))
    }
}

/// An unbounded rearrangement given by a certified finite stem.
#[derive(Debug, Clone, PartialEq)]
pub struct UnboundedRearr {
    pub stem: RearrStem,
    pub checkpoints: Vec<Checkpoint>,
}

impl UnboundedRearr {
    pub fn from_certificate(cert: &WitnessCertificate) -> Result<Self> {
        match &cert.stem {
            IndexerStem::Rearrangement(r) => {
                Ok(UnboundedRearr { stem: r.clone(), checkpoints: cert.checkpoints.clone() })
            }
            other => Err(Error::InvalidStem(format!("expected a rearrangement stem, got {:?}", other.kind()))),
        }
    }

    pub(crate) fn check(&self, series: &SeriesOracle) -> Result<()> {
        verify_checkpoints(series, &self.stem.clone().into(), &self.checkpoints)
            .map_err(|f| Error::InconsistentWitness(f.to_string()))
    }
}

/// Lazily extended view of an [`UnboundedSubseq`].
///
/// Past the certified stem each extension asks the continuation strategy
/// for a block that strictly increases ‖Σ x_{s(i)}‖.
pub(crate) struct SubseqCursor<'a> {
    series: &'a SeriesOracle,
    indices: Vec<usize>,
    acc: RunningSum,
    continuation: Option<GrowthOracle>,
    horizon: usize,
}

impl<'a> SubseqCursor<'a> {
    pub(crate) fn new(series: &'a SeriesOracle, source: &UnboundedSubseq, horizon: usize) -> Self {
        let indices = source.stem.indices().to_vec();
        let mut acc = RunningSum::new(*series.space());
        for &n in &indices {
            series.add_term(&mut acc, n, 1.0);
        }
        SubseqCursor { series, indices, acc, continuation: source.continuation, horizon }
    }

    /// s(pos), 1-based, or `None` once the subsequence cannot be continued
    /// within the horizon.
    pub(crate) fn get(&mut self, pos: usize) -> Result<Option<usize>> {
        while self.indices.len() < pos {
            let Some(oracle) = self.continuation else { return Ok(None) };
            let after = self.indices.last().copied().unwrap_or(0);
            let req = Requirement::above(self.acc.norm());
            let Some(block) = oracle.extend_block(self.series, &self.acc, after, req, self.horizon)? else {
                return Ok(None);
            };
            for n in block {
                self.series.add_term(&mut self.acc, n, 1.0);
                self.indices.push(n);
            }
        }
        Ok(self.indices.get(pos - 1).copied().filter(|&n| n <= self.horizon))
    }
}

/// Builds a subseries whose partial-sum norms at least double from stage
/// to stage, until the norm exceeds `target`.
///
/// Stage 0 takes the first block with nonzero norm b. Each later stage
/// appends a block chosen by the oracle so that the new norm is at least
/// twice the previous one; a block whose own norm is three times the
/// running norm always qualifies, by the reverse triangle inequality. The
/// final stage only has to clear `target`.
pub fn grow_unbounded_subseries(
    series: &SeriesOracle,
    oracle: &GrowthOracle,
    target: f64,
    search_horizon: usize,
) -> Result<WitnessCertificate> {
    let mut stem: Vec<usize> = Vec::new();
    let mut acc = RunningSum::new(*series.space());
    let mut checkpoints = Vec::new();
    let mut req = Requirement::above(0.0);
    loop {
        let after = stem.last().copied().unwrap_or(0);
        let Some(block) = oracle.extend_block(series, &acc, after, req, search_horizon)? else {
            return Err(Error::OracleExhausted { horizon: search_horizon, reached: acc.norm() });
        };
        for n in block {
            series.add_term(&mut acc, n, 1.0);
            stem.push(n);
        }
        let norm = acc.norm();
        checkpoints.push(Checkpoint::partial_sum(stem.len(), norm, req.bound, req.relation));
        if Relation::Gt.holds(norm, target) {
            break;
        }
        let doubled = 2.0 * norm;
        req = if doubled > target { Requirement::above(target) } else { Requirement::at_least(doubled) };
    }
    let last = *checkpoints.last().expect("at least one stage");
    if !(last.relation == Relation::Gt && last.bound == target) {
        checkpoints.push(Checkpoint::partial_sum(last.l, last.norm, target, Relation::Gt));
    }
    let mut cert = WitnessCertificate::new(
        Construction::GrowSubseries,
        SubseqStem::new(stem).expect("blocks are increasing and past the previous index").into(),
    );
    cert.checkpoints = checkpoints;
    cert.strategy = Some(oracle.strategy);
    Ok(cert)
}

/// Records, for each level in `levels`, the first position where the
/// partial-sum norm of `stem` reaches it. Levels never reached are skipped.
pub fn observe_growth(series: &SeriesOracle, stem: IndexerStem, levels: &[f64]) -> WitnessCertificate {
    let mut checkpoints = Vec::new();
    let mut pending = levels.iter().copied().peekable();
    crate::series::for_each_partial_sum(series, &stem, stem.len(), |l, v| {
        while let Some(&level) = pending.peek() {
            if !Relation::Ge.holds(v, level) {
                break;
            }
            checkpoints.push(Checkpoint::partial_sum(l, v, level, Relation::Ge));
            pending.next();
        }
    })
    .expect("horizon equals the stem length");
    let mut cert = WitnessCertificate::new(Construction::Observed, stem);
    cert.checkpoints = checkpoints;
    cert
}

/// Consecutive `Ge` checkpoints of a growth certificate, which must double.
pub fn doubling_chain(cert: &WitnessCertificate) -> Vec<Checkpoint> {
    cert.checkpoints
        .iter()
        .filter(|c| c.quantity == Quantity::PartialSum && c.relation == Relation::Ge)
        .copied()
        .collect()
}
