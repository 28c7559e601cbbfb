//! Catalog series, the three codings of subseries and rearrangements as
//! finite stems, and partial-sum evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{FiniteSupportVector, RunningSum, SpaceSpec};

/// The built-in series. Catalog names are stable CLI strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogSeries {
    /// xₙ = (−1)ⁿ/n on the real line.
    AltHarmonic,
    /// xₙ = eₙ under the sup norm. The standard series in c₀ with every
    /// subseries and rearrangement bounded by 1.
    UnitBasisC0,
    /// xₙ = (−1)ⁿ e_⌈n/2⌉ / ⌈n/2⌉ under the sup norm.
    DecayingSignedC0,
    /// xₙ = (−1)ⁿ n on the real line.
    GrowingReal,
}

impl CatalogSeries {
    pub const ALL: [CatalogSeries; 4] = [
        CatalogSeries::AltHarmonic,
        CatalogSeries::UnitBasisC0,
        CatalogSeries::DecayingSignedC0,
        CatalogSeries::GrowingReal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogSeries::AltHarmonic => "alt-harmonic",
            CatalogSeries::UnitBasisC0 => "unit-basis-c0",
            CatalogSeries::DecayingSignedC0 => "decaying-signed-c0",
            CatalogSeries::GrowingReal => "growing-real",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CatalogSeries::AltHarmonic => "x_n = (-1)^n / n in R",
            CatalogSeries::UnitBasisC0 => "x_n = e_n in c0 (sup norm)",
            CatalogSeries::DecayingSignedC0 => "x_n = (-1)^n e_ceil(n/2) / ceil(n/2) in c0 (sup norm)",
            CatalogSeries::GrowingReal => "x_n = (-1)^n n in R",
        }
    }
}

impl fmt::Display for CatalogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogSeries::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownSeries(s.to_string()))
    }
}

/// Claims a series makes about its terms. They are informational: the
/// constructions never trust them and scan for what they need instead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub liminf_norm_zero: bool,
    pub limsup_norm_infinite: bool,
}

/// A deterministic rule n ↦ xₙ together with its space and metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOracle {
    kind: CatalogSeries,
    space: SpaceSpec,
    metadata: SeriesMetadata,
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl SeriesOracle {
    pub fn kind(&self) -> CatalogSeries {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn metadata(&self) -> SeriesMetadata {
        self.metadata
    }

    /// The value of xₙ on scalar series, `None` otherwise.
    pub fn scalar_term(&self, n: usize) -> Option<f64> {
        assert!(n >= 1, "series terms are indexed from 1");
        match self.kind {
            CatalogSeries::AltHarmonic => Some(sign(n) / n as f64),
            CatalogSeries::GrowingReal => Some(sign(n) * n as f64),
            CatalogSeries::UnitBasisC0 | CatalogSeries::DecayingSignedC0 => None,
        }
    }

    /// The single coordinate and coefficient of xₙ. Every catalog term is
    /// supported on one coordinate.
    fn sparse_term(&self, n: usize) -> (usize, f64) {
        assert!(n >= 1, "series terms are indexed from 1");
        match self.kind {
            CatalogSeries::UnitBasisC0 => (n, 1.0),
            CatalogSeries::DecayingSignedC0 => {
                let k = n.div_ceil(2);
                (k, sign(n) / k as f64)
            }
            _ => (1, self.scalar_term(n).expect("scalar kinds")),
        }
    }

    pub fn term(&self, n: usize) -> FiniteSupportVector {
        let (i, c) = self.sparse_term(n);
        FiniteSupportVector::from_entries([(i, c)])
    }

    pub fn term_norm(&self, n: usize) -> f64 {
        self.sparse_term(n).1.abs()
    }

    /// Adds `coef · xₙ` to the accumulator.
    pub fn add_term(&self, acc: &mut RunningSum, n: usize, coef: f64) {
        if coef == 0.0 {
            return;
        }
        match self.scalar_term(n) {
            Some(x) => acc.add_scalar(coef, x),
            None => {
                let (i, c) = self.sparse_term(n);
                acc.add_vector(coef, &FiniteSupportVector::from_entries([(i, c)]));
            }
        }
    }

    /// Coefficients of the terms on coordinate `i`, as `(n, value)` pairs
    /// with `n` in `from..=to`.
    pub(crate) fn coordinate_terms(&self, i: usize, from: usize, to: usize) -> Vec<(usize, f64)> {
        let candidates: Vec<usize> = match self.kind {
            CatalogSeries::AltHarmonic | CatalogSeries::GrowingReal if i == 1 => (from..=to).collect(),
            CatalogSeries::UnitBasisC0 => vec![i],
            CatalogSeries::DecayingSignedC0 => vec![2 * i - 1, 2 * i],
            _ => vec![],
        };
        candidates
            .into_iter()
            .filter(|n| (from..=to).contains(n))
            .map(|n| (n, self.sparse_term(n).1))
            .collect()
    }

    /// Coordinate carrying xₙ.
    pub(crate) fn coordinate_of(&self, n: usize) -> usize {
        self.sparse_term(n).0
    }
}

pub fn catalog_series(name: &str) -> Result<SeriesOracle> {
    Ok(series_of(name.parse()?))
}

pub fn series_of(kind: CatalogSeries) -> SeriesOracle {
    let (space, metadata) = match kind {
        CatalogSeries::AltHarmonic => (
            SpaceSpec::RealLine,
            SeriesMetadata { liminf_norm_zero: true, limsup_norm_infinite: false },
        ),
        CatalogSeries::UnitBasisC0 => (SpaceSpec::c0(), SeriesMetadata::default()),
        CatalogSeries::DecayingSignedC0 => (
            SpaceSpec::c0(),
            SeriesMetadata { liminf_norm_zero: true, limsup_norm_infinite: false },
        ),
        CatalogSeries::GrowingReal => (
            SpaceSpec::RealLine,
            SeriesMetadata { liminf_norm_zero: false, limsup_norm_infinite: true },
        ),
    };
    SeriesOracle { kind, space, metadata }
}

/// Prefix of an element of {0,1}^ℕ. Positions past the word are undefined.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectionStem(Vec<bool>);

impl SelectionStem {
    pub fn new(bits: Vec<bool>) -> Self {
        SelectionStem(bits)
    }

    /// The all-ones word, selecting every term.
    pub fn identity(len: usize) -> Self {
        SelectionStem(vec![true; len])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for SelectionStem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidStem(format!("selection words use 0/1, got {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SelectionStem)
    }
}

impl fmt::Display for SelectionStem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&b| f.write_str(if b { "1" } else { "0" }))
    }
}

/// Prefix of a strictly increasing s ∈ S.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubseqStem(Vec<usize>);

impl SubseqStem {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.first() == Some(&0) {
            return Err(Error::InvalidStem("indices are positive".into()));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStem(format!(
                "subsequence indices must increase strictly, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(SubseqStem(indices))
    }

    pub fn identity(len: usize) -> Self {
        SubseqStem((1..=len).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

/// Prefix of a bijection p ∈ P: an injective finite sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RearrStem(Vec<usize>);

impl RearrStem {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.contains(&0) {
            return Err(Error::InvalidStem("values are positive".into()));
        }
        let top = values.iter().copied().max().unwrap_or(0);
        let mut seen = vec![false; top + 1];
        for &v in &values {
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidStem(format!("value {v} repeats")));
            }
        }
        Ok(RearrStem(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<usize>) -> Self {
        RearrStem(values)
    }

    pub fn identity(len: usize) -> Self {
        RearrStem((1..=len).collect())
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StemKind {
    Selection,
    Subsequence,
    Rearrangement,
}

/// A finite prefix of one of the three codings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexerStem {
    Selection(SelectionStem),
    Subsequence(SubseqStem),
    Rearrangement(RearrStem),
}

impl IndexerStem {
    pub fn kind(&self) -> StemKind {
        match self {
            IndexerStem::Selection(_) => StemKind::Selection,
            IndexerStem::Subsequence(_) => StemKind::Subsequence,
            IndexerStem::Rearrangement(_) => StemKind::Rearrangement,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            IndexerStem::Selection(s) => s.len(),
            IndexerStem::Subsequence(s) => s.len(),
            IndexerStem::Rearrangement(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The i-th summand (1-based) as `(series index, coefficient)`.
    pub fn summand(&self, i: usize) -> (usize, f64) {
        match self {
            IndexerStem::Selection(s) => (i, if s.0[i - 1] { 1.0 } else { 0.0 }),
            IndexerStem::Subsequence(s) => (s.0[i - 1], 1.0),
            IndexerStem::Rearrangement(s) => (s.0[i - 1], 1.0),
        }
    }
}

impl From<SelectionStem> for IndexerStem {
    fn from(s: SelectionStem) -> Self {
        IndexerStem::Selection(s)
    }
}

impl From<SubseqStem> for IndexerStem {
    fn from(s: SubseqStem) -> Self {
        IndexerStem::Subsequence(s)
    }
}

impl From<RearrStem> for IndexerStem {
    fn from(s: RearrStem) -> Self {
        IndexerStem::Rearrangement(s)
    }
}

/// Norms of the partial sums l ↦ ‖Σ_{i≤l} summand(i)‖ for l = 1..=horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumTrace {
    pub stem: IndexerStem,
    pub checkpoints: Vec<(usize, f64)>,
}

impl PartialSumTrace {
    pub fn horizon(&self) -> usize {
        self.checkpoints.last().map_or(0, |c| c.0)
    }

    pub fn norm_at(&self, l: usize) -> Option<f64> {
        self.checkpoints.get(l.checked_sub(1)?).filter(|c| c.0 == l).map(|c| c.1)
    }
}

/// Streams the partial-sum norms to `visit` without storing them.
pub fn for_each_partial_sum(
    series: &SeriesOracle,
    stem: &IndexerStem,
    horizon: usize,
    mut visit: impl FnMut(usize, f64),
) -> Result<()> {
    if horizon > stem.len() {
        return Err(Error::HorizonExceedsStem { horizon, len: stem.len() });
    }
    let mut acc = RunningSum::new(*series.space());
    for l in 1..=horizon {
        let (n, coef) = stem.summand(l);
        series.add_term(&mut acc, n, coef);
        visit(l, acc.norm());
    }
    Ok(())
}

pub fn partial_sums(series: &SeriesOracle, stem: &IndexerStem, horizon: usize) -> Result<PartialSumTrace> {
    let mut checkpoints = Vec::with_capacity(horizon);
    for_each_partial_sum(series, stem, horizon, |l, v| checkpoints.push((l, v)))?;
    Ok(PartialSumTrace { stem: stem.clone(), checkpoints })
}

/// Shortest extension of an injective stem to a bijection of {1,…,k},
/// k = max(values ∪ {len}), appending the missing values in increasing order.
pub fn extend_to_prefix_bijection(stem: &RearrStem) -> RearrStem {
    let values = stem.values();
    let k = values.iter().copied().max().unwrap_or(0).max(values.len());
    let mut used = vec![false; k + 1];
    for &v in values {
        used[v] = true;
    }
    let mut out = values.to_vec();
    out.extend((1..=k).filter(|&v| !used[v]));
    RearrStem(out)
}

/// Whether `values` is a permutation of {1,…,values.len()}.
pub fn is_prefix_bijection(values: &[usize]) -> bool {
    let k = values.len();
    let mut seen = vec![false; k + 1];
    values
        .iter()
        .all(|&v| (1..=k).contains(&v) && !std::mem::replace(&mut seen[v], true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn alt() -> SeriesOracle {
        series_of(CatalogSeries::AltHarmonic)
    }

    #[test]
    fn catalog_terms() {
        assert_eq!(alt().term(3), FiniteSupportVector::scalar(-1.0 / 3.0));
        let c0 = catalog_series("unit-basis-c0").unwrap();
        assert_eq!(c0.term(5), FiniteSupportVector::unit(5));
        assert_eq!(catalog_series("growing-real").unwrap().term(4), FiniteSupportVector::scalar(4.0));
        let d = catalog_series("decaying-signed-c0").unwrap();
        assert_eq!(d.term(3), FiniteSupportVector::from_entries([(2, -0.5)]));
        assert_eq!(d.term(4), FiniteSupportVector::from_entries([(2, 0.5)]));
    }

    #[test]
    fn catalog_metadata() {
        assert!(alt().metadata().liminf_norm_zero);
        assert!(series_of(CatalogSeries::DecayingSignedC0).metadata().liminf_norm_zero);
        assert!(series_of(CatalogSeries::GrowingReal).metadata().limsup_norm_infinite);
        assert_eq!(series_of(CatalogSeries::UnitBasisC0).metadata(), SeriesMetadata::default());
    }

    #[test]
    fn unknown_catalog_name() {
        assert_eq!(catalog_series("harmonic"), Err(Error::UnknownSeries("harmonic".into())));
    }

    #[test]
    fn catalog_names_round_trip() {
        for c in CatalogSeries::ALL {
            assert_eq!(c.name().parse::<CatalogSeries>().unwrap(), c);
        }
    }

    #[test]
    fn partial_sums_examples() {
        let stem = SubseqStem::new(vec![1, 2]).unwrap().into();
        let t = partial_sums(&alt(), &stem, 2).unwrap();
        assert_eq!(t.checkpoints, vec![(1, 1.0), (2, 0.5)]);

        let c0 = series_of(CatalogSeries::UnitBasisC0);
        let stem: IndexerStem = "10110".parse::<SelectionStem>().unwrap().into();
        let t = partial_sums(&c0, &stem, 5).unwrap();
        assert!(t.checkpoints.iter().all(|&(_, v)| v == 1.0));

        let stem: IndexerStem = "00101".parse::<SelectionStem>().unwrap().into();
        let t = partial_sums(&c0, &stem, 5).unwrap();
        let norms: Vec<f64> = t.checkpoints.iter().map(|c| c.1).collect();
        assert_eq!(norms, vec![0.0, 0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn odd_index_subseries_matches_direct_summation() {
        const K: usize = 500;
        let stem = SubseqStem::new((1..=K).map(|k| 2 * k - 1).collect()).unwrap().into();
        let t = partial_sums(&alt(), &stem, K).unwrap();
        let direct: f64 = (1..=K).map(|k| 1.0 / (2 * k - 1) as f64).sum();
        assert!((t.norm_at(K).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn horizon_beyond_stem() {
        let stem = SubseqStem::identity(3).into();
        assert_eq!(
            partial_sums(&alt(), &stem, 4),
            Err(Error::HorizonExceedsStem { horizon: 4, len: 3 })
        );
    }

    #[test]
    fn stem_validation() {
        assert!(SubseqStem::new(vec![1, 1]).is_err());
        assert!(SubseqStem::new(vec![0, 1]).is_err());
        assert!(SubseqStem::new(vec![2, 5, 9]).is_ok());
        assert!(RearrStem::new(vec![3, 1, 3]).is_err());
        assert!(RearrStem::new(vec![0]).is_err());
        assert!("10a".parse::<SelectionStem>().is_err());
        assert_eq!("1011".parse::<SelectionStem>().unwrap().to_string(), "1011");
    }

    #[test]
    fn prefix_bijection_examples() {
        let ext = |v: Vec<usize>| extend_to_prefix_bijection(&RearrStem::new(v).unwrap()).values().to_vec();
        assert_eq!(ext(vec![3, 1]), vec![3, 1, 2]);
        assert_eq!(ext(vec![1, 2, 3]), vec![1, 2, 3]);
        assert_eq!(ext(vec![5, 1]), vec![5, 1, 2, 3, 4]);
        assert_eq!(ext(vec![]), Vec::<usize>::new());
    }

    #[test]
    fn prefix_bijection_is_shortest_among_permutations() {
        // brute force: smallest k admitting a permutation of {1..k} that
        // starts with (5,1), and its lexicographically least such permutation
        let (k, least) = (2..=5)
            .find_map(|k| {
                (1..=k)
                    .permutations(k)
                    .filter(|p| p[..2] == [5, 1])
                    .min()
                    .map(|p| (k, p))
            })
            .unwrap();
        let ours = extend_to_prefix_bijection(&RearrStem::new(vec![5, 1]).unwrap());
        assert_eq!(k, 5);
        assert_eq!(least, ours.values());
    }

    #[test]
    fn prefix_bijection_exhaustive_over_small_stems() {
        for len in 0..=6 {
            for stem in (1..=6).permutations(len) {
                let ext = extend_to_prefix_bijection(&RearrStem::new(stem.clone()).unwrap());
                assert_eq!(&ext.values()[..len], &stem[..]);
                assert!(is_prefix_bijection(ext.values()), "{stem:?} -> {:?}", ext.values());
                let k = stem.iter().copied().max().unwrap_or(0).max(len);
                assert_eq!(ext.len(), k);
            }
        }
    }
}
