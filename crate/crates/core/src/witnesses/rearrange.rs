//! From an unbounded subseries to an unbounded rearrangement.

use crate::error::{Error, Result};
use crate::series::{extend_to_prefix_bijection, RearrStem, SeriesOracle};
use crate::spaces::RunningSum;

use super::certificate::{Checkpoint, Construction, Relation, WitnessCertificate};
use super::growth::{SubseqCursor, UnboundedSubseq};

/// Interleaves an unbounded subseries s with prefix-bijection fills.
///
/// Stage j appends s(k_{j−1}+1), s(k_{j−1}+2), … until the partial sum of
/// the rearrangement reaches norm j at position n_j, then completes the
/// stem to a bijection of {1,…,k_j} with k_j > n_j. Since s(i) ≥ i, the
/// appended values never collide with the earlier bijection. The result
/// certifies ‖Σ_{i≤n_j} x_{p(i)}‖ ≥ j for j = 1..=depth.
///
/// Each fill brings the running sum back to the series' own partial sum
/// at k_j, so the stages can need far more of s than its certified stem;
/// the cursor continues s with its growth strategy up to `scan_horizon`.
pub fn subseries_to_rearrangement(
    series: &SeriesOracle,
    s: &UnboundedSubseq,
    depth: usize,
    scan_horizon: usize,
) -> Result<WitnessCertificate> {
    s.check(series)?;
    let mut cert = WitnessCertificate::new(Construction::SubseriesToRearrangement, RearrStem::default().into());
    if depth == 0 {
        return Ok(cert);
    }
    let mut cursor = SubseqCursor::new(series, s, scan_horizon);
    let mut p: Vec<usize> = Vec::new();
    let mut acc = RunningSum::new(*series.space());
    for j in 1..=depth {
        let level = j as f64;
        loop {
            let pos = p.len() + 1;
            let Some(n) = cursor.get(pos)? else {
                return Err(Error::ScanHorizonExhausted {
                    horizon: scan_horizon,
                    what: format!(
                        "stage {j}: the subseries ran out at position {pos} with partial-sum norm {} < {j}",
                        acc.norm()
                    ),
                });
            };
            series.add_term(&mut acc, n, 1.0);
            p.push(n);
            if Relation::Ge.holds(acc.norm(), level) {
                break;
            }
        }
        let n_j = p.len();
        cert.checkpoints.push(Checkpoint::partial_sum(n_j, acc.norm(), level, Relation::Ge));

        let mut extended = extend_to_prefix_bijection(&RearrStem::from_vec_unchecked(p.clone())).values().to_vec();
        if extended.len() == n_j {
            // k_j > n_j
            extended.push(n_j + 1);
        }
        for &v in &extended[n_j..] {
            series.add_term(&mut acc, v, 1.0);
        }
        p = extended;
        cert.stages.push(p.len());
    }
    cert.stem = RearrStem::from_vec_unchecked(p).into();
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{is_prefix_bijection, series_of, CatalogSeries, IndexerStem, SubseqStem};
    use crate::witnesses::certificate::verify_certificate;
    use crate::witnesses::growth::{grow_unbounded_subseries, observe_growth, GrowthOracle, Strategy};

    fn direct_sum(series: &SeriesOracle, values: &[usize]) -> f64 {
        values.iter().map(|&n| series.scalar_term(n).unwrap()).sum::<f64>().abs()
    }

    #[test]
    fn growing_real_depth_two() {
        let g = series_of(CatalogSeries::GrowingReal);
        let stem = SubseqStem::new((1..=20).map(|i| 2 * i).collect()).unwrap();
        let s = UnboundedSubseq::from_certificate(&observe_growth(&g, stem.into(), &[1.0, 2.0])).unwrap();
        let cert = subseries_to_rearrangement(&g, &s, 2, 100).unwrap();
        // (2) fills to (2,1); then s(3) = 6 gives 2 - 1 + 6 = 7
        assert_eq!(cert.stem, IndexerStem::Rearrangement(RearrStem::new(vec![2, 1, 6, 3, 4, 5]).unwrap()));
        assert_eq!(cert.stages, vec![2, 6]);
        let values = [2, 1, 6];
        assert_eq!(cert.checkpoints[0].norm, direct_sum(&g, &values[..1]));
        assert_eq!(cert.checkpoints[1].norm, direct_sum(&g, &values));
        verify_certificate(&g, &cert).unwrap();
    }

    #[test]
    fn depth_zero_is_vacuous() {
        let g = series_of(CatalogSeries::GrowingReal);
        let s = UnboundedSubseq::from_certificate(&observe_growth(&g, SubseqStem::identity(3).into(), &[])).unwrap();
        let cert = subseries_to_rearrangement(&g, &s, 0, 100).unwrap();
        assert!(cert.stem.is_empty());
        assert!(cert.checkpoints.is_empty());
    }

    #[test]
    fn alternating_harmonic_negative_depth_three() {
        let alt = series_of(CatalogSeries::AltHarmonic);
        let grown = grow_unbounded_subseries(&alt, &GrowthOracle::new(Strategy::GreedyNegative), 3.0, 1_000_000).unwrap();
        let s = UnboundedSubseq::from_certificate(&grown).unwrap();
        let cert = subseries_to_rearrangement(&alt, &s, 3, 1_000_000).unwrap();
        verify_certificate(&alt, &cert).unwrap();
        let IndexerStem::Rearrangement(r) = &cert.stem else { panic!() };
        for &k in &cert.stages {
            assert!(is_prefix_bijection(&r.values()[..k]));
        }
        for (j, c) in cert.checkpoints.iter().enumerate() {
            let direct = direct_sum(&alt, &r.values()[..c.l]);
            assert!((direct - c.norm).abs() < 1e-9);
            assert!(direct >= (j + 1) as f64 - 1e-9);
        }
    }

    #[test]
    fn identity_stage_is_lengthened() {
        // s = identity on growing-real: x1 = -1 already has norm 1 and
        // (1) is a bijection of {1}, so the stage appends 2
        let g = series_of(CatalogSeries::GrowingReal);
        let s = UnboundedSubseq::from_certificate(&observe_growth(&g, SubseqStem::identity(10).into(), &[1.0])).unwrap();
        let cert = subseries_to_rearrangement(&g, &s, 1, 100).unwrap();
        assert_eq!(cert.stem, IndexerStem::Rearrangement(RearrStem::new(vec![1, 2]).unwrap()));
        assert_eq!(cert.stages, vec![2]);
    }

    #[test]
    fn unit_basis_cannot_reach_two() {
        let c0 = series_of(CatalogSeries::UnitBasisC0);
        let s = UnboundedSubseq::from_certificate(&observe_growth(&c0, SubseqStem::identity(50).into(), &[1.0])).unwrap();
        let err = subseries_to_rearrangement(&c0, &s, 2, 1000).unwrap_err();
        assert!(err.is_exhaustion());
    }

    #[test]
    fn tampered_growth_witness() {
        let g = series_of(CatalogSeries::GrowingReal);
        let mut s = UnboundedSubseq::from_certificate(&observe_growth(&g, SubseqStem::identity(10).into(), &[1.0])).unwrap();
        s.checkpoints[0].norm = 5.0;
        assert!(matches!(subseries_to_rearrangement(&g, &s, 1, 100), Err(Error::InconsistentWitness(_))));
    }
}
