use std::time::Instant;

use serieswit::ideals::{exceedance_report, i_bounded_verdict_with_threshold};
use serieswit::series::{for_each_partial_sum, partial_sums, series_of, IndexerStem, SelectionStem, SeriesOracle};
use serieswit::witnesses::{
    dense_open_witness_am, dense_open_witness_bm, dense_open_witness_cm, grow_unbounded_subseries, limsup_subseries,
    nowhere_dense_witness_rearr, nowhere_dense_witness_subseq, subseries_to_rearrangement, uniform_bound_bruteforce,
    verify_certificate, Checkpoint, Construction, GrowthOracle, Relation, Strategy, UnboundedRearr, UnboundedSubseq,
    WitnessCertificate,
};
use serieswit::Error;

use crate::config::{RunConfig, Task};
use crate::document::{CertificateDocument, DocVerdict, EncodedStem, Timing};
use crate::{CliError, EXIT_EXHAUSTED, EXIT_OK};

/// Extra depths tried when a rearrangement built at the minimal depth
/// cannot reach the required norm past the open set.
const EXTRA_DEPTHS: usize = 2;

pub struct RunOutcome {
    pub document: CertificateDocument,
    pub exit_code: i32,
}

enum Failure {
    Exhausted(Vec<(Option<Strategy>, String)>),
    Error(CliError),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e.into())
    }
}

/// Greedy strategies on the real line, per-coordinate then exhaustive otherwise.
pub fn auto_strategies(series: &SeriesOracle) -> Vec<Strategy> {
    if series.space().is_scalar() {
        vec![Strategy::GreedyPositive, Strategy::GreedyNegative]
    } else {
        vec![Strategy::PerCoordinate, Strategy::Exhaustive]
    }
}

fn stem_norm(series: &SeriesOracle, stem: IndexerStem) -> f64 {
    let mut last = 0.0;
    for_each_partial_sum(series, &stem, stem.len(), |_, v| last = v).expect("horizon equals the stem length");
    last
}

/// One pass of a witness pipeline with a fixed growth strategy.
fn attempt(config: &RunConfig, series: &SeriesOracle, strategy: Strategy) -> serieswit::Result<WitnessCertificate> {
    let oracle = GrowthOracle::new(strategy);
    let h = config.resolved_horizon(series);
    let m = config.m;
    let grow = |target: f64| -> serieswit::Result<UnboundedSubseq> {
        UnboundedSubseq::from_certificate(&grow_unbounded_subseries(series, &oracle, target, h)?)
    };
    let rearrangement = |depth: usize| -> serieswit::Result<UnboundedRearr> {
        let s = grow(depth as f64)?;
        UnboundedRearr::from_certificate(&subseries_to_rearrangement(series, &s, depth, h)?)
    };
    // open-set stems were checked by validate()
    match config.construction {
        Task::GrowSubseries => grow_unbounded_subseries(series, &oracle, config.target, h),
        Task::Rearrangement => {
            let s = grow(config.depth as f64)?;
            subseries_to_rearrangement(series, &s, config.depth, h)
        }
        Task::NowhereSubseq => {
            let u = config.open_subseq().expect("validated");
            let s = grow(m as f64 + stem_norm(series, u.clone().into()) + 1.0)?;
            nowhere_dense_witness_subseq(series, &s, m, &u, h)
        }
        Task::NowhereRearr => {
            let v = config.open_rearr().expect("validated");
            let first = m + 1;
            let last = first + stem_norm(series, v.clone().into()).ceil() as usize + EXTRA_DEPTHS;
            let mut outcome = None;
            for depth in first..=last {
                match nowhere_dense_witness_rearr(series, &rearrangement(depth)?, m, &v, h) {
                    Err(e) if e.is_exhaustion() => outcome = Some(Err(e)),
                    other => return other,
                }
            }
            outcome.expect("at least one depth")
        }
        Task::DenseOpenBm => {
            let u = grow((m + 1) as f64)?;
            dense_open_witness_bm(series, &config.sequence(), &u, m, &config.open_subseq().expect("validated"), h)
        }
        Task::DenseOpenCm => {
            let v = config.open_rearr().expect("validated");
            let mut outcome = None;
            for depth in m + 2..=m + 2 + EXTRA_DEPTHS {
                match dense_open_witness_cm(series, &config.sequence(), &rearrangement(depth)?, m, &v, h) {
                    Err(e) if e.is_exhaustion() => outcome = Some(Err(e)),
                    other => return other,
                }
            }
            outcome.expect("at least one depth")
        }
        Task::DenseOpenAm => {
            let u = grow((m + 1) as f64)?;
            let stem = config.selection().expect("validated").unwrap_or_default();
            dense_open_witness_am(series, &config.sequence(), &u, m, &stem, h)
        }
        Task::Limsup | Task::UniformBound | Task::IBounded => unreachable!("no growth strategy involved"),
    }
}

fn build_witness(config: &RunConfig, series: &SeriesOracle) -> Result<WitnessCertificate, Failure> {
    if config.construction == Task::Limsup {
        return limsup_subseries(series, config.depth, config.resolved_horizon(series)).map_err(|e| {
            if e.is_exhaustion() {
                Failure::Exhausted(vec![(None, e.to_string())])
            } else {
                e.into()
            }
        });
    }
    let strategies = config.strategy.map_or_else(|| auto_strategies(series), |s| vec![s]);
    let mut exhausted = Vec::new();
    for strategy in strategies {
        match attempt(config, series, strategy) {
            Ok(cert) => return Ok(cert),
            Err(e) if e.is_exhaustion() => exhausted.push((Some(strategy), e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    Err(Failure::Exhausted(exhausted))
}

fn claim(config: &RunConfig, cert: &WitnessCertificate) -> String {
    let m = config.m;
    let last = cert.final_checkpoint().map_or(0, |c| c.l);
    match cert.construction {
        Construction::GrowSubseries => format!("subseries partial sum exceeds {} at l = {last}", config.target),
        Construction::SubseriesToRearrangement => {
            format!("rearrangement partial sums reach norms 1..={} at prefix-bijection stages {:?}", config.depth, cert.stages)
        }
        Construction::NowhereDenseSubseq | Construction::NowhereDenseRearr => {
            format!("stem extends the open set and its partial sum at l = {last} exceeds m = {m}")
        }
        Construction::DenseOpenBm | Construction::DenseOpenCm | Construction::DenseOpenAm => {
            let k = cert.interval.as_ref().map_or(0, |c| c.k);
            format!("every partial sum over I_{k} exceeds m = {m}, with k = {k} > m")
        }
        Construction::LimsupSubseries => {
            format!("term norms and partial-sum norms strictly increase over {} steps", config.depth)
        }
        Construction::Observed => "observed growth levels".into(),
    }
}

fn fill_witness(doc: &mut CertificateDocument, cert: &WitnessCertificate, claim: String) {
    doc.construction = Some(cert.construction);
    doc.stem = Some(EncodedStem::encode(&cert.stem));
    doc.checkpoints = cert.checkpoints.clone();
    doc.interval = cert.interval.clone();
    doc.stages = cert.stages.clone();
    doc.strategy = cert.strategy;
    doc.verdicts.push(DocVerdict::Certified { claim });
}

/// Runs one configuration. Exit code 0 when a result was produced (and,
/// unless disabled, re-verified), 2 when every search exhausted its horizon.
/// Errors map to exit code 1.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let series = series_of(config.series);
    let mut config = config.clone();
    config.horizon = Some(config.resolved_horizon(&series));
    config.validate()?;
    let h = config.resolved_horizon(&series);
    let mut doc = CertificateDocument::new(config.clone());
    let mut exit_code = EXIT_OK;

    match config.construction {
        Task::UniformBound => {
            let value = uniform_bound_bruteforce(&series, config.n, config.alphabet)?;
            doc.verdicts.push(DocVerdict::UniformBound { n: config.n, alphabet: config.alphabet, value });
            doc.self_verified = config.verify;
        }
        Task::IBounded => {
            let stem: IndexerStem = config.selection()?.unwrap_or_else(|| SelectionStem::identity(h)).into();
            let ideal = config.ideal_spec();
            let seq = ideal.talagrand();
            let outcome = i_bounded_verdict_with_threshold(&series, &stem, &ideal, config.big_m, h, config.threshold)?;
            let trace = partial_sums(&series, &stem, h)?;
            let report = exceedance_report(&trace, config.big_m, &seq)?;
            for &k in &report.contained_intervals {
                for l in seq.interval(k)? {
                    let norm = trace.norm_at(l).expect("interval lies inside the horizon");
                    doc.checkpoints.push(Checkpoint::partial_sum(l, norm, config.big_m, Relation::Gt));
                }
            }
            doc.stem = Some(EncodedStem::encode(&stem));
            doc.verdicts.push(DocVerdict::IBounded {
                ideal: config.ideal,
                sequence: seq,
                outcome,
                contained_intervals: report.contained_intervals,
            });
            if config.verify {
                crate::verify::verify_document(&doc)?;
                doc.self_verified = true;
            }
        }
        _ => match build_witness(&config, &series) {
            Ok(cert) => {
                fill_witness(&mut doc, &cert, claim(&config, &cert));
                if config.verify {
                    verify_certificate(&series, &cert).map_err(CliError::SelfCheck)?;
                    doc.self_verified = true;
                }
            }
            Err(Failure::Exhausted(attempts)) => {
                for (strategy, detail) in attempts {
                    doc.verdicts.push(DocVerdict::Exhausted { strategy, detail });
                }
                exit_code = EXIT_EXHAUSTED;
            }
            Err(Failure::Error(e)) => return Err(e),
        },
    }
    doc.timing = Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 };
    Ok(RunOutcome { document: doc, exit_code })
}
