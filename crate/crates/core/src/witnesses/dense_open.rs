//! Certificates that a basic open set meets B_m, C_m or the 0-1 analogue:
//! a stem whose partial-sum norms exceed m at every position of some I_k
//! with k > m.

use std::collections::HashSet;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::ideals::TalagrandSequence;
use crate::series::{extend_to_prefix_bijection, RearrStem, SelectionStem, SeriesOracle, SubseqStem};
use crate::spaces::RunningSum;

use super::certificate::{Checkpoint, Construction, IntervalClaim, Relation, WitnessCertificate};
use super::growth::{SubseqCursor, UnboundedRearr, UnboundedSubseq};

/// Increasing indices v₁ < … < v_length, all past `after_index`, with
/// Σ‖x_{vᵢ}‖ < `budget`.
///
/// Each vᵢ is the first index past the previous one whose norm is below
/// the remaining budget split evenly over the remaining picks. The
/// remaining budget then stays positive, so the total stays below
/// `budget`, and unlike fixed thresholds budget/2^{i+1} the scan stays
/// short for long blocks.
pub fn small_norm_block(
    series: &SeriesOracle,
    after_index: usize,
    length: usize,
    budget: f64,
    scan_horizon: usize,
) -> Result<SubseqStem> {
    if length == 0 || budget.is_nan() || budget <= 0.0 {
        return Err(Error::PreconditionViolation(format!(
            "small-norm block needs length >= 1 and budget > 0 (got length {length}, budget {budget})"
        )));
    }
    let mut left = budget;
    let mut block = Vec::with_capacity(length);
    let mut n = after_index;
    for remaining in (1..=length).rev() {
        let threshold = left / remaining as f64;
        loop {
            n += 1;
            if n > scan_horizon {
                return Err(Error::ScanHorizonExhausted {
                    horizon: scan_horizon,
                    what: format!(
                        "term {} of {length} of the small-norm block: no norm below {threshold:e}",
                        block.len() + 1
                    ),
                });
            }
            let norm = series.term_norm(n);
            if norm < threshold {
                left -= norm;
                block.push(n);
                break;
            }
        }
    }
    Ok(SubseqStem::new(block).expect("scan is increasing"))
}

fn require_long_stem(r: usize, m: usize) -> Result<()> {
    if r <= m {
        return Err(Error::PreconditionViolation(format!(
            "the open set's stem has length r = {r}, but r > m = {m} is required"
        )));
    }
    Ok(())
}

/// Smallest k > m with n_k > `len`, and I_k.
fn interval_past(seq: &TalagrandSequence, len: usize, m: usize) -> Result<(usize, Range<usize>)> {
    let k = seq
        .first_point_above(len)
        .ok_or_else(|| Error::Unsupported(format!("{seq} has no point above {len}")))?
        .max(m + 1);
    Ok((k, seq.interval(k)?))
}

/// Continues `acc` with the terms of `tail` (coefficient 1) and records a
/// `> m` checkpoint at every position of `range`. Positions before
/// `offset + 1` are already in `acc`.
fn interval_checkpoints(
    series: &SeriesOracle,
    acc: &mut RunningSum,
    offset: usize,
    tail: &[usize],
    range: Range<usize>,
    m: usize,
) -> Result<Vec<Checkpoint>> {
    let bound = m as f64;
    let mut out = Vec::with_capacity(range.len());
    for (i, &n) in tail.iter().enumerate() {
        series.add_term(acc, n, 1.0);
        let l = offset + i + 1;
        if range.contains(&l) {
            let norm = acc.norm();
            if !Relation::Gt.holds(norm, bound) {
                return Err(Error::InconsistentWitness(format!(
                    "partial sum at l = {l} has norm {norm}, not above {m}"
                )));
            }
            out.push(Checkpoint::partial_sum(l, norm, bound, Relation::Gt));
        }
    }
    Ok(out)
}

fn claim(k: usize, seq: &TalagrandSequence, m: usize) -> Option<IntervalClaim> {
    Some(IntervalClaim { k, sequence: seq.clone(), bound: m as f64 })
}

/// Inside U = {w extends (s₁,…,s_r)}, r > m: appends u(l), …, u(l_r) until
/// the norm exceeds m + 1, then a block of total norm < 1 up to position
/// n_{k+1} − 1 for the smallest k > m with n_k past the u-part. Every
/// partial sum over I_k stays above m.
///
/// The u-part starts at the first position l > r with u(l) > s_r, as in
/// the nowhere-dense splice, so that the stem stays increasing.
pub fn dense_open_witness_bm(
    series: &SeriesOracle,
    seq: &TalagrandSequence,
    u: &UnboundedSubseq,
    m: usize,
    open_set: &SubseqStem,
    scan_horizon: usize,
) -> Result<WitnessCertificate> {
    let r = open_set.len();
    require_long_stem(r, m)?;
    u.check(series)?;
    let s_r = open_set.last().unwrap_or(0);
    let mut stem = open_set.indices().to_vec();
    let mut acc = RunningSum::new(*series.space());
    for &n in &stem {
        series.add_term(&mut acc, n, 1.0);
    }
    let lifted = (m + 1) as f64;
    let mut cursor = SubseqCursor::new(series, u, scan_horizon);
    let mut pos = r;
    loop {
        pos += 1;
        let Some(n) = cursor.get(pos)? else {
            return Err(Error::ScanHorizonExhausted {
                horizon: scan_horizon,
                what: format!("u ran out at position {pos} with norm {} <= {}", acc.norm(), m + 1),
            });
        };
        if n <= s_r {
            continue;
        }
        series.add_term(&mut acc, n, 1.0);
        stem.push(n);
        if Relation::Gt.holds(acc.norm(), lifted) {
            break;
        }
    }
    let l_r = stem.len();
    let lifted_cp = Checkpoint::partial_sum(l_r, acc.norm(), lifted, Relation::Gt);
    let (k, range) = interval_past(seq, l_r, m)?;
    let block = small_norm_block(series, stem[l_r - 1], range.end - 1 - l_r, 1.0, scan_horizon)?;
    let mut checkpoints = vec![lifted_cp];
    checkpoints.extend(interval_checkpoints(series, &mut acc, l_r, block.indices(), range, m)?);
    stem.extend_from_slice(block.indices());

    let mut cert =
        WitnessCertificate::new(Construction::DenseOpenBm, SubseqStem::new(stem).expect("increasing by construction").into());
    cert.checkpoints = checkpoints;
    cert.interval = claim(k, seq, m);
    Ok(cert)
}

/// Inside U = {w extends (p₁,…,p_r)}, r > m: with z = max(r, p₁,…,p_r),
/// appends t(z+1), …, t(m_r) until the norm exceeds m + 1, then a
/// small-norm block past every value used so far, up to position
/// n_{k+1} − 1. The stem is then completed to a prefix bijection.
///
/// Values t(i) already among p₁,…,p_r are skipped to keep the stem
/// injective; with no skips the u-part ends at position r + m_r − z.
pub fn dense_open_witness_cm(
    series: &SeriesOracle,
    seq: &TalagrandSequence,
    t: &UnboundedRearr,
    m: usize,
    open_set: &RearrStem,
    scan_horizon: usize,
) -> Result<WitnessCertificate> {
    let r = open_set.len();
    require_long_stem(r, m)?;
    t.check(series)?;
    let p = open_set.values();
    let z = p.iter().copied().max().unwrap_or(0).max(r);
    let used: HashSet<usize> = p.iter().copied().collect();
    let mut stem = p.to_vec();
    let mut acc = RunningSum::new(*series.space());
    for &v in &stem {
        series.add_term(&mut acc, v, 1.0);
    }
    let lifted = (m + 1) as f64;
    let tv = t.stem.values();
    let mut m_r = z;
    let mut top = z;
    loop {
        m_r += 1;
        let Some(&v) = tv.get(m_r - 1).filter(|&&v| v <= scan_horizon) else {
            return Err(Error::ScanHorizonExhausted {
                horizon: scan_horizon,
                what: format!("t ran out at position {m_r} with norm {} <= {}", acc.norm(), m + 1),
            });
        };
        if used.contains(&v) {
            continue;
        }
        series.add_term(&mut acc, v, 1.0);
        stem.push(v);
        top = top.max(v);
        if Relation::Gt.holds(acc.norm(), lifted) {
            break;
        }
    }
    let lifted_at = stem.len();
    let lifted_cp = Checkpoint::partial_sum(lifted_at, acc.norm(), lifted, Relation::Gt);
    let (k, range) = interval_past(seq, lifted_at, m)?;
    let block = small_norm_block(series, top.max(m_r), range.end - 1 - lifted_at, 1.0, scan_horizon)?;
    let mut checkpoints = vec![lifted_cp];
    checkpoints.extend(interval_checkpoints(series, &mut acc, lifted_at, block.indices(), range, m)?);
    stem.extend_from_slice(block.indices());

    let full = extend_to_prefix_bijection(&RearrStem::from_vec_unchecked(stem));
    let mut cert = WitnessCertificate::new(Construction::DenseOpenCm, full.clone().into());
    cert.checkpoints = checkpoints;
    cert.interval = claim(k, seq, m);
    cert.stages.push(full.len());
    Ok(cert)
}

/// 0-1 version: extends `stem` with 1s at the positions u(l) > r until the
/// norm exceeds m, then 0s through n_{k+1} − 1. Zeros leave the partial
/// sum unchanged, so no small-norm terms are needed.
pub fn dense_open_witness_am(
    series: &SeriesOracle,
    seq: &TalagrandSequence,
    u: &UnboundedSubseq,
    m: usize,
    stem: &SelectionStem,
    scan_horizon: usize,
) -> Result<WitnessCertificate> {
    u.check(series)?;
    let bound = m as f64;
    let mut bits = stem.bits().to_vec();
    let mut acc = RunningSum::new(*series.space());
    for (i, &b) in bits.iter().enumerate() {
        if b {
            series.add_term(&mut acc, i + 1, 1.0);
        }
    }
    let mut cursor = SubseqCursor::new(series, u, scan_horizon);
    let mut pos = 0;
    while !Relation::Gt.holds(acc.norm(), bound) {
        pos += 1;
        let Some(n) = cursor.get(pos)? else {
            return Err(Error::ScanHorizonExhausted {
                horizon: scan_horizon,
                what: format!("u ran out at position {pos} with norm {} <= {m}", acc.norm()),
            });
        };
        if n <= bits.len() {
            continue;
        }
        bits.resize(n - 1, false);
        bits.push(true);
        series.add_term(&mut acc, n, 1.0);
    }
    let (k, range) = interval_past(seq, bits.len(), m)?;
    bits.resize(range.end - 1, false);
    let norm = acc.norm();
    let mut cert = WitnessCertificate::new(Construction::DenseOpenAm, SelectionStem::new(bits).into());
    cert.checkpoints = range.map(|l| Checkpoint::partial_sum(l, norm, bound, Relation::Gt)).collect();
    cert.interval = claim(k, seq, m);
    Ok(cert)
}
