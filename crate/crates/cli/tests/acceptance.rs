//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serieswit::ideals::{density_at, TalagrandSequence};
use serieswit::series::{series_of, CatalogSeries, IndexerStem};
use serieswit::witnesses::{rearrangement_prefix_bound, uniform_bound_bruteforce, Alphabet, Quantity, Strategy};
use serieswit_cli::{run, verify_document, CertificateDocument, CliError, DocVerdict, RunConfig, Task, EXIT_EXHAUSTED, EXIT_OK};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn alt_harmonic(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0 / n as f64
    } else {
        -1.0 / n as f64
    }
}

fn growing_real(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        n as f64
    } else {
        -(n as f64)
    }
}

/// Partial sums of a real series along a stem, computed from the term
/// formula alone.
fn direct_sums(term: fn(usize) -> f64, stem: &IndexerStem) -> Vec<f64> {
    let picks: Vec<(usize, f64)> = match stem {
        IndexerStem::Selection(s) => s.bits().iter().enumerate().map(|(i, &b)| (i + 1, if b { 1.0 } else { 0.0 })).collect(),
        IndexerStem::Subsequence(s) => s.indices().iter().map(|&n| (n, 1.0)).collect(),
        IndexerStem::Rearrangement(r) => r.values().iter().map(|&n| (n, 1.0)).collect(),
    };
    let mut acc = 0.0;
    picks
        .into_iter()
        .map(|(n, c)| {
            acc += c * term(n);
            acc
        })
        .collect()
}

fn stem_of(doc: &CertificateDocument) -> Result<IndexerStem, String> {
    doc.stem.as_ref().ok_or("document has no stem")?.decode().map_err(|e| e.to_string())
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn certified(config: &RunConfig) -> Result<CertificateDocument, String> {
    let out = run(config).map_err(|e| e.to_string())?;
    if out.exit_code != EXIT_OK {
        return Err(format!("{} on {} exited {}", config.construction, config.series, out.exit_code));
    }
    verify_document(&out.document).map_err(|e| format!("verify: {e}"))?;
    Ok(out.document)
}

fn c0_uniform_bound() -> Outcome {
    let c0 = series_of(CatalogSeries::UnitBasisC0);
    for (alphabet, max_n) in [(Alphabet::Binary, 12), (Alphabet::Signed, 10)] {
        for n in 1..=max_n {
            let v = uniform_bound_bruteforce(&c0, n, alphabet).map_err(|e| e.to_string())?;
            if v != 1.0 {
                return Err(format!("{alphabet} bound at n = {n} is {v}"));
            }
        }
    }
    Ok("unit-basis-c0 bound is 1 for binary n <= 12 and signed n <= 10".into())
}

fn signed_within_twice_binary() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for kind in CatalogSeries::ALL {
        let s = series_of(kind);
        for n in 1..=10 {
            let signed = uniform_bound_bruteforce(&s, n, Alphabet::Signed).map_err(|e| e.to_string())?;
            let binary = uniform_bound_bruteforce(&s, n, Alphabet::Binary).map_err(|e| e.to_string())?;
            if signed > 2.0 * binary + 1e-12 {
                return Err(format!("{kind}, n = {n}: signed {signed} > 2 * {binary}"));
            }
            if binary > 0.0 {
                worst = worst.max(signed / binary);
            }
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("signed <= 2 * binary on every catalog series, n <= 10 (largest ratio {worst:.4}) in {:.2?}", start.elapsed()))
}

fn rearrangement_bound_matches_selections() -> Outcome {
    let start = Instant::now();
    let n = 8;
    let mut best: f64 = 0.0;
    for mask in 0u32..1 << n {
        let sum: f64 = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).map(alt_harmonic).sum();
        best = best.max(sum.abs());
    }
    let bound = rearrangement_prefix_bound(&series_of(CatalogSeries::AltHarmonic), n).map_err(|e| e.to_string())?;
    if (bound - best).abs() > 1e-12 {
        return Err(format!("rearrangement bound {bound}, selection maximum {best}"));
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("alt-harmonic on 1..=8: both maxima equal {bound:.6}"))
}

fn subseries_then_rearrangement() -> Outcome {
    let start = Instant::now();
    let mut k = 0;
    let mut acc = 0.0;
    while acc <= 3.0 {
        k += 1;
        acc += alt_harmonic(2 * k);
    }

    let mut grow = RunConfig::new(CatalogSeries::AltHarmonic, Task::GrowSubseries);
    grow.strategy = Some(Strategy::GreedyPositive);
    grow.target = 3.0;
    let doc = certified(&grow)?;
    let IndexerStem::Subsequence(u) = stem_of(&doc)? else { return Err("grow produced no subsequence".into()) };
    let evens: Vec<usize> = (1..=k).map(|i| 2 * i).collect();
    if u.indices() != evens.as_slice() {
        return Err(format!("subseries stem has length {}, expected the first {k} even indices", u.len()));
    }

    let mut rearr = RunConfig::new(CatalogSeries::AltHarmonic, Task::Rearrangement);
    rearr.strategy = Some(Strategy::GreedyPositive);
    rearr.depth = 3;
    rearr.horizon = Some(20_000_000);
    let doc = certified(&rearr)?;
    let IndexerStem::Rearrangement(p) = stem_of(&doc)? else { return Err("no rearrangement stem".into()) };
    for &stage in &doc.stages {
        let mut prefix = p.values()[..stage].to_vec();
        prefix.sort_unstable();
        if prefix != (1..=stage).collect::<Vec<_>>() {
            return Err(format!("prefix of length {stage} is not a bijection of 1..={stage}"));
        }
    }
    let sums = direct_sums(alt_harmonic, &IndexerStem::Rearrangement(p));
    for level in 1..=3 {
        let hit = doc.checkpoints.iter().any(|c| {
            c.quantity == Quantity::PartialSum && c.bound >= level as f64 && sums[c.l - 1].abs() >= level as f64
        });
        if !hit {
            return Err(format!("no checkpoint reaches norm {level}"));
        }
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("K = {k} evens, rearrangement stages {:?}, verify ok in {:.2?}", doc.stages, start.elapsed()))
}

fn interval_witnesses() -> Outcome {
    let mut notes = Vec::new();
    let cases = [
        (CatalogSeries::AltHarmonic, Task::DenseOpenBm, alt_harmonic as fn(usize) -> f64),
        (CatalogSeries::GrowingReal, Task::DenseOpenAm, growing_real),
        (CatalogSeries::AltHarmonic, Task::DenseOpenCm, alt_harmonic),
    ];
    for (series, task, term) in cases {
        let start = Instant::now();
        let mut c = RunConfig::new(series, task);
        c.m = 1;
        c.talagrand = Some(serieswit_cli::TalagrandChoice::Geometric);
        c.horizon = Some(100_000);
        let doc = certified(&c)?;
        let claim = doc.interval.as_ref().ok_or("no interval claim")?;
        if claim.sequence != TalagrandSequence::Geometric || claim.k <= c.m {
            return Err(format!("{task}: claim {claim:?}"));
        }
        let sums = direct_sums(term, &stem_of(&doc)?);
        let interval = (1usize << claim.k)..(1usize << (claim.k + 1));
        for j in interval.clone() {
            match sums.get(j - 1) {
                Some(v) if v.abs() > c.m as f64 => {}
                Some(v) => return Err(format!("{task}: |S_{j}| = {v} is not above {}", c.m)),
                None => return Err(format!("{task}: stem stops before {j}")),
            }
        }
        within(Duration::from_secs(30), start)?;
        notes.push(format!("{task} I_{} = [{}, {})", claim.k, interval.start, interval.end));
    }
    Ok(notes.join(", "))
}

fn i_bounded_c0() -> Outcome {
    let mut c = RunConfig::new(CatalogSeries::UnitBasisC0, Task::IBounded);
    c.ideal = serieswit_cli::IdealChoice::Density;
    c.big_m = 0.5;
    c.horizon = Some(64);
    let doc = certified(&c)?;
    let Some(DocVerdict::IBounded { contained_intervals, sequence, .. }) = doc.verdicts.first() else {
        return Err("no i-bounded verdict".into());
    };
    let expected: Vec<(usize, usize)> = vec![(2, 4), (4, 8), (8, 16), (16, 32), (32, 64)];
    let got: Vec<(usize, usize)> = contained_intervals
        .iter()
        .map(|&k| sequence.interval(k).map(|r| (r.start, r.end)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if got != expected {
        return Err(format!("contained intervals {got:?}"));
    }
    let union: BTreeSet<usize> = got.iter().flat_map(|&(a, b)| a..b).collect();
    let d = density_at(&union, 63);
    if d < 0.5 {
        return Err(format!("density of the union at 63 is {d}"));
    }
    Ok(format!("5 intervals [2,4) .. [32,64), union density at 63 = {d:.4}"))
}

fn c0_exhausts() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_serieswit");
    let mut names = Vec::new();
    for task in Task::ALL.into_iter().filter(|t| t.is_witness()) {
        let status = Command::new(bin)
            .args(["run", "--series", "unit-basis-c0", "--construction", task.name()])
            .args(["--m", "2", "--target", "2", "--depth", "2"])
            .env_remove(serieswit_cli::HORIZON_ENV)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if status.code() != Some(EXIT_EXHAUSTED) {
            return Err(format!("{task} exited {status}"));
        }
        names.push(task.name());
    }
    Ok(format!("{} witness constructions exit 2: {}", names.len(), names.join(", ")))
}

fn perturbations_are_caught() -> Outcome {
    let configs = [
        RunConfig::new(CatalogSeries::AltHarmonic, Task::GrowSubseries),
        RunConfig::new(CatalogSeries::AltHarmonic, Task::NowhereRearr),
        RunConfig::new(CatalogSeries::GrowingReal, Task::Limsup),
        RunConfig::new(CatalogSeries::GrowingReal, Task::DenseOpenAm),
        {
            let mut c = RunConfig::new(CatalogSeries::UnitBasisC0, Task::IBounded);
            c.big_m = 0.5;
            c.horizon = Some(64);
            c
        },
    ];
    let mut total = 0;
    for c in configs {
        let doc = certified(&c)?;
        for i in 0..doc.checkpoints.len() {
            let mut bad = doc.clone();
            bad.checkpoints[i].norm += 0.1;
            match verify_document(&bad) {
                Err(CliError::Fault(f)) if f.checkpoint_index() == Some(i) => {
                    let msg = CliError::Fault(f).to_string();
                    if !msg.contains(&format!("checkpoint {i} ")) {
                        return Err(format!("message does not name checkpoint {i}: {msg}"));
                    }
                }
                other => return Err(format!("{} checkpoint {i}: {other:?}", c.construction)),
            }
            total += 1;
        }
    }
    Ok(format!("{total} perturbed checkpoints each rejected by index"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("c0 uniform bound is 1", c0_uniform_bound),
        ("signed bound within twice the binary bound", signed_within_twice_binary),
        ("rearrangement prefix bound equals selection maximum", rearrangement_bound_matches_selections),
        ("subseries growth then rearrangement", subseries_then_rearrangement),
        ("dense-open interval witnesses", interval_witnesses),
        ("i-bounded evidence on c0", i_bounded_c0),
        ("bounded series exhaust every construction", c0_exhausts),
        ("perturbed checkpoints are rejected", perturbations_are_caught),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
