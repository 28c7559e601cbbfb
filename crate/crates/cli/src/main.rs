use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use serieswit::series::CatalogSeries;
use serieswit::witnesses::{Alphabet, Strategy};
use serieswit_cli::{
    catalog_table, run, verify_path, CliError, DocVerdict, IdealChoice, RunConfig, TalagrandChoice,
    VerifyOutcome, EXIT_EXHAUSTED, EXIT_FAILURE, EXIT_OK, HORIZON_ENV,
};

#[derive(Parser)]
#[command(name = "serieswit", version, about = "Witness certificates for unbounded subseries and rearrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a construction and emit its certificate document.
    Run(Box<RunArgs>),
    /// Re-check a certificate document against the catalog.
    Verify { path: PathBuf },
    /// Catalog commands.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the catalog series.
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    series: String,
    /// grow-subseries, rearrangement, nowhere-subseq, nowhere-rearr,
    /// dense-open-bm, dense-open-cm, dense-open-am, limsup, uniform-bound, i-bounded
    #[arg(long)]
    construction: String,
    #[arg(long = "m", default_value_t = 1)]
    m: usize,
    /// Bound for the i-bounded verdict.
    #[arg(long = "M", default_value_t = 1.0)]
    big_m: f64,
    #[arg(long, default_value_t = 3.0)]
    target: f64,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Word length for uniform-bound.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Scan horizon [default: 10^6 for scalar series, 10^4 otherwise]
    #[arg(long, env = HORIZON_ENV)]
    horizon: Option<usize>,
    #[arg(long, default_value = "density")]
    ideal: String,
    /// geometric (n_k = 2^k) or linear (n_k = k) [default: from --ideal]
    #[arg(long)]
    talagrand: Option<String>,
    /// Growth strategy, or auto to try each applicable one.
    #[arg(long, default_value = "auto")]
    strategy: String,
    /// Open-set stem: comma-separated indices, or a 0-1 word for dense-open-am and i-bounded.
    #[arg(long)]
    stem: Option<String>,
    /// binary or signed, for uniform-bound.
    #[arg(long, default_value = "binary")]
    alphabet: String,
    /// Contained intervals needed for i-unbounded evidence.
    #[arg(long, default_value_t = serieswit::ideals::DEFAULT_EVIDENCE_THRESHOLD)]
    threshold: usize,
    /// Write the document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip re-verification of the produced certificate.
    #[arg(long)]
    no_verify: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let series: CatalogSeries = self.series.parse()?;
        let mut config = RunConfig::new(series, self.construction.parse()?);
        config.m = self.m;
        config.big_m = self.big_m;
        config.target = self.target;
        config.depth = self.depth;
        config.n = self.n;
        config.horizon = self.horizon;
        config.ideal = self.ideal.parse::<IdealChoice>()?;
        config.talagrand = self.talagrand.as_deref().map(str::parse::<TalagrandChoice>).transpose()?;
        config.strategy = match self.strategy.as_str() {
            "auto" => None,
            s => Some(s.parse::<Strategy>()?),
        };
        config.stem = self.stem;
        config.alphabet = self.alphabet.parse::<Alphabet>()?;
        config.threshold = self.threshold;
        config.verify = !self.no_verify;
        config.out = self.out;
        Ok(config)
    }
}

fn summary(config: &RunConfig, doc: &serieswit_cli::CertificateDocument) -> String {
    let mut lines = vec![
        format!("series        {}", config.series.name()),
        format!("construction  {}", config.construction),
    ];
    for v in &doc.verdicts {
        lines.push(match v {
            DocVerdict::Certified { claim } => format!("certified     {claim}"),
            DocVerdict::Exhausted { strategy, detail } => {
                format!("exhausted     {}: {detail}", strategy.map_or("scan".to_string(), |s| s.to_string()))
            }
            DocVerdict::UniformBound { n, alphabet, value } => format!("bound         n = {n}, {alphabet}: {value}"),
            DocVerdict::IBounded { outcome, contained_intervals, .. } => {
                format!("verdict       {:?}, contained intervals {contained_intervals:?}", outcome.verdict)
            }
        });
    }
    if let Some(stem) = &doc.stem {
        let len = match stem {
            serieswit_cli::EncodedStem::Selection { len, .. }
            | serieswit_cli::EncodedStem::Subsequence { len, .. }
            | serieswit_cli::EncodedStem::Rearrangement { len, .. } => len,
        };
        lines.push(format!("stem length   {len}"));
    }
    lines.push(format!("checkpoints   {}", doc.checkpoints.len()));
    lines.push(format!("self-verified {}", doc.self_verified));
    lines.push(format!("elapsed       {:.1} ms", doc.timing.elapsed_ms));
    lines.join("\n")
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(args) => {
            let config = args.into_config()?;
            let outcome = run(&config)?;
            let json = outcome.document.to_json();
            match &config.out {
                Some(path) => {
                    std::fs::write(path, json).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    println!("{}", summary(&config, &outcome.document));
                    println!("written       {}", path.display());
                }
                None => print!("{json}"),
            }
            Ok(outcome.exit_code)
        }
        Command::Verify { path } => match verify_path(&path)? {
            VerifyOutcome::Verified => {
                println!("ok: every checkpoint of {} holds", path.display());
                Ok(EXIT_OK)
            }
            VerifyOutcome::Exhausted => {
                println!("{} records an exhausted search; nothing to verify", path.display());
                Ok(EXIT_EXHAUSTED)
            }
        },
        Command::Catalog { command: CatalogCommand::List } => {
            print!("{}", catalog_table());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which here means exhaustion
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
