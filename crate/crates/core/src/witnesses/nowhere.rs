//! Escapes from the closed sets A_m = {s : ‖Σ_{i≤n} x_{s(i)}‖ ≤ m ∀n} and
//! D_m (same for rearrangements) inside a prescribed basic open set.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::series::{extend_to_prefix_bijection, RearrStem, SeriesOracle, SubseqStem};
use crate::spaces::RunningSum;

use super::certificate::{Checkpoint, Construction, Relation, WitnessCertificate};
use super::growth::{SubseqCursor, UnboundedRearr, UnboundedSubseq};

fn exhausted(horizon: usize, what: String) -> Error {
    Error::ScanHorizonExhausted { horizon, what }
}

/// Splices the tail of an unbounded s′ after the basic open set
/// U = {w extends (s₁,…,s_k)}: u = (s₁,…,s_k, s′(l), s′(l+1), …) with l
/// the first position where s′(l) > s_k. The certificate names the first
/// n with ‖Σ_{i≤n} x_{u(i)}‖ > m, so u ∉ A_m.
pub fn nowhere_dense_witness_subseq(
    series: &SeriesOracle,
    s_prime: &UnboundedSubseq,
    m: usize,
    open_set: &SubseqStem,
    scan_horizon: usize,
) -> Result<WitnessCertificate> {
    s_prime.check(series)?;
    let bound = m as f64;
    let mut cursor = SubseqCursor::new(series, s_prime, scan_horizon);
    let last = open_set.last().unwrap_or(0);
    let mut u = open_set.indices().to_vec();
    let mut acc = RunningSum::new(*series.space());
    let mut hit = None;
    for (i, &n) in u.iter().enumerate() {
        series.add_term(&mut acc, n, 1.0);
        if hit.is_none() && Relation::Gt.holds(acc.norm(), bound) {
            hit = Some((i + 1, acc.norm()));
        }
    }
    if hit.is_none() {
        // l: first position with s′(l) > s_k
        let mut pos = 1;
        let mut next = loop {
            match cursor.get(pos)? {
                Some(n) if n > last => break Some(n),
                Some(_) => pos += 1,
                None => return Err(exhausted(scan_horizon, format!("s' has no index above {last}"))),
            }
        };
        while hit.is_none() {
            let Some(n) = next else {
                return Err(exhausted(
                    scan_horizon,
                    format!("no partial sum of the spliced subsequence exceeds {m} (last norm {})", acc.norm()),
                ));
            };
            series.add_term(&mut acc, n, 1.0);
            u.push(n);
            if Relation::Gt.holds(acc.norm(), bound) {
                hit = Some((u.len(), acc.norm()));
            }
            pos += 1;
            next = cursor.get(pos)?;
        }
    }
    let (n, norm) = hit.expect("loop exits with a hit");
    let mut cert = WitnessCertificate::new(
        Construction::NowhereDenseSubseq,
        SubseqStem::new(u).expect("splice keeps indices increasing").into(),
    );
    cert.checkpoints.push(Checkpoint::partial_sum(n, norm, bound, Relation::Gt));
    Ok(cert)
}

/// Escapes D_m inside V = {w extends (p₁,…,p_k)}.
///
/// With l₁ the first position such that p′(1..l₁−1) covers {p₁,…,p_k}, the
/// stem (p₁,…,p_k, p′(l₁),…,p′(j₁)) for the first j₁ > l₁ whose partial sum
/// exceeds m is completed to a bijection of {1,…,k₁}.
pub fn nowhere_dense_witness_rearr(
    series: &SeriesOracle,
    p_prime: &UnboundedRearr,
    m: usize,
    open_set: &RearrStem,
    scan_horizon: usize,
) -> Result<WitnessCertificate> {
    p_prime.check(series)?;
    let bound = m as f64;
    let tail = p_prime.stem.values();
    let mut missing: HashSet<usize> = open_set.values().iter().copied().collect();
    let mut l1 = 1;
    while !missing.is_empty() {
        let Some(&v) = tail.get(l1 - 1) else {
            return Err(exhausted(scan_horizon, "p' never covers the values of V".into()));
        };
        missing.remove(&v);
        l1 += 1;
    }
    let mut stem = open_set.values().to_vec();
    let mut acc = RunningSum::new(*series.space());
    for &v in &stem {
        series.add_term(&mut acc, v, 1.0);
    }
    let mut j = l1;
    loop {
        let Some(&v) = tail.get(j - 1).filter(|&&v| v <= scan_horizon) else {
            return Err(exhausted(
                scan_horizon,
                format!("p' ran out at position {j} before a partial sum exceeded {m}"),
            ));
        };
        series.add_term(&mut acc, v, 1.0);
        stem.push(v);
        if j > l1 && Relation::Gt.holds(acc.norm(), bound) {
            break;
        }
        j += 1;
    }
    let n = stem.len();
    let norm = acc.norm();
    let full = extend_to_prefix_bijection(&RearrStem::from_vec_unchecked(stem));
    let mut cert = WitnessCertificate::new(Construction::NowhereDenseRearr, full.clone().into());
    cert.checkpoints.push(Checkpoint::partial_sum(n, norm, bound, Relation::Gt));
    cert.stages.push(full.len());
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{series_of, CatalogSeries, IndexerStem};
    use crate::witnesses::certificate::verify_certificate;
    use crate::witnesses::growth::{grow_unbounded_subseries, observe_growth, GrowthOracle, Strategy};
    use crate::witnesses::rearrange::subseries_to_rearrangement;

    fn evens(series: &SeriesOracle, target: f64) -> UnboundedSubseq {
        let cert = grow_unbounded_subseries(series, &GrowthOracle::new(Strategy::GreedyPositive), target, 100_000).unwrap();
        UnboundedSubseq::from_certificate(&cert).unwrap()
    }

    #[test]
    fn subseq_escape_alternating_harmonic() {
        let alt = series_of(CatalogSeries::AltHarmonic);
        let u = SubseqStem::new(vec![1, 3]).unwrap();
        let cert = nowhere_dense_witness_subseq(&alt, &evens(&alt, 3.0), 1, &u, 100_000).unwrap();
        // |-1 - 1/3| > 1 already at n = 2
        assert_eq!(cert.stem, IndexerStem::Subsequence(u));
        assert_eq!(cert.checkpoints[0].l, 2);
        assert!((cert.checkpoints[0].norm - 4.0 / 3.0).abs() < 1e-12);
        verify_certificate(&alt, &cert).unwrap();
    }

    #[test]
    fn subseq_escape_needs_the_tail() {
        let alt = series_of(CatalogSeries::AltHarmonic);
        let u = SubseqStem::new(vec![1, 3]).unwrap();
        let cert = nowhere_dense_witness_subseq(&alt, &evens(&alt, 3.0), 2, &u, 100_000).unwrap();
        let IndexerStem::Subsequence(stem) = &cert.stem else { panic!() };
        assert_eq!(&stem.indices()[..3], &[1, 3, 4]);
        // oracle: -4/3 + sum of 1/(2k), k = 2..K, first exceeds 2 in norm
        let mut s: f64 = -4.0 / 3.0;
        let mut k = 1;
        while s.abs() <= 2.0 + 1e-9 {
            k += 1;
            s += 1.0 / (2 * k) as f64;
        }
        assert_eq!(stem.last(), Some(2 * k));
        assert!((cert.checkpoints[0].norm - s.abs()).abs() < 1e-9);
        verify_certificate(&alt, &cert).unwrap();
    }

    #[test]
    fn subseq_escape_single_term() {
        let alt = series_of(CatalogSeries::AltHarmonic);
        let u = SubseqStem::new(vec![2]).unwrap();
        let cert = nowhere_dense_witness_subseq(&alt, &evens(&alt, 1.0), 0, &u, 10).unwrap();
        assert_eq!(cert.checkpoints[0].l, 1);
        assert_eq!(cert.checkpoints[0].norm, 0.5);
    }

    #[test]
    fn subseq_escape_unit_basis_exhausts() {
        let c0 = series_of(CatalogSeries::UnitBasisC0);
        let s = UnboundedSubseq::from_certificate(&observe_growth(&c0, SubseqStem::identity(200).into(), &[1.0])).unwrap();
        let err = nowhere_dense_witness_subseq(&c0, &s, 2, &SubseqStem::new(vec![1]).unwrap(), 200).unwrap_err();
        assert!(err.is_exhaustion());
    }

    #[test]
    fn rearr_escape_growing_real() {
        let g = series_of(CatalogSeries::GrowingReal);
        let p = UnboundedRearr::from_certificate(&observe_growth(&g, RearrStem::identity(100).into(), &[1.0, 5.0])).unwrap();
        let cert = nowhere_dense_witness_rearr(&g, &p, 3, &RearrStem::new(vec![1]).unwrap(), 100).unwrap();
        // -1+2-3+4-5+6-7 = -4 is the first sum past 3 with j > l1 = 2
        assert_eq!(cert.stem, IndexerStem::Rearrangement(RearrStem::identity(7)));
        assert_eq!(cert.checkpoints[0].l, 7);
        assert_eq!(cert.checkpoints[0].norm, 4.0);
        assert_eq!(cert.stages, vec![7]);
        verify_certificate(&g, &cert).unwrap();
    }

    #[test]
    fn rearr_escape_alternating_harmonic() {
        let alt = series_of(CatalogSeries::AltHarmonic);
        let s = evens(&alt, 1.0);
        let p = subseries_to_rearrangement(&alt, &s, 2, 100_000).unwrap();
        let p = UnboundedRearr::from_certificate(&p).unwrap();
        let v = RearrStem::new(vec![2, 1]).unwrap();
        let cert = nowhere_dense_witness_rearr(&alt, &p, 1, &v, 100_000).unwrap();
        let IndexerStem::Rearrangement(r) = &cert.stem else { panic!() };
        assert_eq!(&r.values()[..2], &[2, 1]);
        assert!(cert.checkpoints[0].norm > 1.0);
        verify_certificate(&alt, &cert).unwrap();
    }

    #[test]
    fn rearr_escape_unit_basis_exhausts() {
        let c0 = series_of(CatalogSeries::UnitBasisC0);
        let p = UnboundedRearr::from_certificate(&observe_growth(&c0, RearrStem::identity(1000).into(), &[1.0])).unwrap();
        let err = nowhere_dense_witness_rearr(&c0, &p, 2, &RearrStem::new(vec![1, 2]).unwrap(), 1000).unwrap_err();
        assert!(err.is_exhaustion());
    }
}
