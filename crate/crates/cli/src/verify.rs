use std::path::Path;

use serieswit::ideals::{exceedance_report, i_bounded_verdict_with_threshold};
use serieswit::series::{partial_sums, series_of};
use serieswit::witnesses::{uniform_bound_bruteforce, verify_certificate, verify_checkpoints, WitnessCertificate, NORM_TOLERANCE};

use crate::config::Task;
use crate::document::{CertificateDocument, DocVerdict};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Every recorded inequality and verdict was recomputed and holds.
    Verified,
    /// The document records an exhausted search; there is nothing to check.
    Exhausted,
}

/// Recomputes a document from its stem and the catalog.
pub fn verify_document(doc: &CertificateDocument) -> Result<VerifyOutcome, CliError> {
    let config = &doc.config;
    let series = series_of(config.series);
    if doc.is_exhausted() {
        return Ok(VerifyOutcome::Exhausted);
    }
    match config.construction {
        Task::UniformBound => {
            for v in &doc.verdicts {
                if let DocVerdict::UniformBound { n, alphabet, value } = *v {
                    let recomputed = uniform_bound_bruteforce(&series, n, alphabet)?;
                    if (recomputed - value).abs() > NORM_TOLERANCE * recomputed.abs().max(1.0) {
                        return Err(CliError::Mismatch(format!(
                            "uniform bound over n = {n}: recorded {value}, recomputed {recomputed}"
                        )));
                    }
                }
            }
        }
        Task::IBounded => {
            let stem = doc.stem.as_ref().ok_or_else(|| CliError::Malformed("i-bounded document without a stem".into()))?.decode()?;
            verify_checkpoints(&series, &stem, &doc.checkpoints)?;
            let h = config
                .horizon
                .ok_or_else(|| CliError::Malformed("i-bounded document without a horizon".into()))?;
            for v in &doc.verdicts {
                if let DocVerdict::IBounded { sequence, outcome, contained_intervals, .. } = v {
                    let ideal = config.ideal_spec();
                    let recomputed = i_bounded_verdict_with_threshold(&series, &stem, &ideal, config.big_m, h, config.threshold)?;
                    if &recomputed != outcome {
                        return Err(CliError::Mismatch(format!("verdict: recorded {outcome:?}, recomputed {recomputed:?}")));
                    }
                    let report = exceedance_report(&partial_sums(&series, &stem, h)?, config.big_m, sequence)?;
                    if &report.contained_intervals != contained_intervals {
                        return Err(CliError::Mismatch(format!(
                            "contained intervals: recorded {contained_intervals:?}, recomputed {:?}",
                            report.contained_intervals
                        )));
                    }
                }
            }
        }
        _ => {
            let stem = doc.stem.as_ref().ok_or_else(|| CliError::Malformed("witness document without a stem".into()))?.decode()?;
            let construction =
                doc.construction.ok_or_else(|| CliError::Malformed("witness document without a construction".into()))?;
            let cert = WitnessCertificate {
                construction,
                stem,
                checkpoints: doc.checkpoints.clone(),
                interval: doc.interval.clone(),
                stages: doc.stages.clone(),
                strategy: doc.strategy,
            };
            verify_certificate(&series, &cert)?;
        }
    }
    Ok(VerifyOutcome::Verified)
}

pub fn verify_path(path: &Path) -> Result<VerifyOutcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    verify_document(&CertificateDocument::from_json(&text)?)
}
