//! Subseries along which both the term norms and the partial-sum norms
//! increase to infinity.

use crate::error::{Error, Result};
use crate::series::{SeriesOracle, SubseqStem};
use crate::spaces::RunningSum;

use super::certificate::{Checkpoint, Construction, Relation, WitnessCertificate};

/// Greedy u with ‖x_{u(n+1)}‖ > ‖x_{u(n)}‖ and ‖x_{u(n+1)}‖ > 2‖Σ_{i≤n} x_{u(i)}‖
/// for n = 1..=depth; u(1) is the first nonzero term.
///
/// The second inequality gives ‖Σ_{i≤n+1}‖ ≥ ‖x_{u(n+1)}‖ − ‖Σ_{i≤n}‖ > ‖Σ_{i≤n}‖.
/// For each n the certificate holds two term checkpoints at n + 1 and the
/// resulting partial-sum checkpoint.
pub fn limsup_subseries(series: &SeriesOracle, depth: usize, scan_horizon: usize) -> Result<WitnessCertificate> {
    let mut cert = WitnessCertificate::new(Construction::LimsupSubseries, SubseqStem::default().into());
    if depth == 0 {
        return Ok(cert);
    }
    let mut stem: Vec<usize> = Vec::with_capacity(depth + 1);
    let mut acc = RunningSum::new(*series.space());
    let mut last_norm: f64 = 0.0;
    let mut n = 0;
    for step in 0..=depth {
        let sum_norm = acc.norm();
        let need = if step == 0 { 0.0 } else { last_norm.max(2.0 * sum_norm) };
        let found = loop {
            n += 1;
            if n > scan_horizon {
                return Err(Error::ScanHorizonExhausted {
                    horizon: scan_horizon,
                    what: format!("no term past index {} with norm above {need}", stem.last().copied().unwrap_or(0)),
                });
            }
            let norm = series.term_norm(n);
            if Relation::Gt.holds(norm, need) {
                break norm;
            }
        };
        series.add_term(&mut acc, n, 1.0);
        stem.push(n);
        if step > 0 {
            let l = stem.len();
            cert.checkpoints.push(Checkpoint::term(l, found, last_norm, Relation::Gt));
            cert.checkpoints.push(Checkpoint::term(l, found, 2.0 * sum_norm, Relation::Gt));
            cert.checkpoints.push(Checkpoint::partial_sum(l, acc.norm(), sum_norm, Relation::Gt));
        }
        last_norm = found;
    }
    cert.stem = SubseqStem::new(stem).expect("scan is increasing").into();
    Ok(cert)
}
