use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use serieswit::ideals::{IdealSpec, TalagrandSequence};
use serieswit::series::{CatalogSeries, RearrStem, SelectionStem, SeriesOracle, SubseqStem};
use serieswit::witnesses::{Alphabet, Strategy, MAX_PATTERN_LEN};

use crate::CliError;

/// Default scan horizon for scalar series.
pub const SCALAR_HORIZON: usize = 1_000_000;
/// Default scan horizon for sequence-space series.
pub const SEQUENCE_HORIZON: usize = 10_000;
/// Environment variable overriding the default horizon.
pub const HORIZON_ENV: &str = "SERIESWIT_HORIZON";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    GrowSubseries,
    Rearrangement,
    NowhereSubseq,
    NowhereRearr,
    DenseOpenBm,
    DenseOpenCm,
    DenseOpenAm,
    Limsup,
    UniformBound,
    IBounded,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::GrowSubseries,
        Task::Rearrangement,
        Task::NowhereSubseq,
        Task::NowhereRearr,
        Task::DenseOpenBm,
        Task::DenseOpenCm,
        Task::DenseOpenAm,
        Task::Limsup,
        Task::UniformBound,
        Task::IBounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::GrowSubseries => "grow-subseries",
            Task::Rearrangement => "rearrangement",
            Task::NowhereSubseq => "nowhere-subseq",
            Task::NowhereRearr => "nowhere-rearr",
            Task::DenseOpenBm => "dense-open-bm",
            Task::DenseOpenCm => "dense-open-cm",
            Task::DenseOpenAm => "dense-open-am",
            Task::Limsup => "limsup",
            Task::UniformBound => "uniform-bound",
            Task::IBounded => "i-bounded",
        }
    }

    /// Whether the task builds a witness stem (as opposed to a number or verdict).
    pub fn is_witness(self) -> bool {
        !matches!(self, Task::UniformBound | Task::IBounded)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Task::ALL.iter().map(|t| t.name()).collect();
            CliError::Config(format!("unknown construction `{s}` (known: {})", known.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealChoice {
    Fin,
    Density,
}

impl FromStr for IdealChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "fin" => Ok(IdealChoice::Fin),
            "density" => Ok(IdealChoice::Density),
            _ => Err(CliError::Config(format!("unknown ideal `{s}` (known: fin, density)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TalagrandChoice {
    Geometric,
    Linear,
}

impl FromStr for TalagrandChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "geometric" => Ok(TalagrandChoice::Geometric),
            "linear" => Ok(TalagrandChoice::Linear),
            _ => Err(CliError::Config(format!("unknown talagrand sequence `{s}` (known: geometric, linear)"))),
        }
    }
}

/// Everything a run depends on. Serialized verbatim into the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub series: CatalogSeries,
    pub construction: Task,
    pub m: usize,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub target: f64,
    pub depth: usize,
    /// Word length for `uniform-bound`.
    pub n: usize,
    pub horizon: Option<usize>,
    pub ideal: IdealChoice,
    pub talagrand: Option<TalagrandChoice>,
    /// `None` tries every applicable strategy in turn.
    pub strategy: Option<Strategy>,
    /// Open-set stem: comma-separated indices, or a 0-1 word for selections.
    pub stem: Option<String>,
    pub alphabet: Alphabet,
    pub threshold: usize,
    pub verify: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(series: CatalogSeries, construction: Task) -> Self {
        RunConfig {
            series,
            construction,
            m: 1,
            big_m: 1.0,
            target: 3.0,
            depth: 3,
            n: 10,
            horizon: None,
            ideal: IdealChoice::Density,
            talagrand: None,
            strategy: None,
            stem: None,
            alphabet: Alphabet::Binary,
            threshold: serieswit::ideals::DEFAULT_EVIDENCE_THRESHOLD,
            verify: true,
            out: None,
        }
    }

    /// Explicit horizon, else 10^6 for scalar and 10^4 for sequence spaces.
    pub fn resolved_horizon(&self, series: &SeriesOracle) -> usize {
        self.horizon.unwrap_or(if series.space().is_scalar() { SCALAR_HORIZON } else { SEQUENCE_HORIZON })
    }

    pub fn sequence(&self) -> TalagrandSequence {
        match (self.talagrand, self.ideal) {
            (Some(TalagrandChoice::Geometric), _) | (None, IdealChoice::Density) => TalagrandSequence::Geometric,
            (Some(TalagrandChoice::Linear), _) | (None, IdealChoice::Fin) => TalagrandSequence::Linear,
        }
    }

    pub fn ideal_spec(&self) -> IdealSpec {
        match (self.talagrand, self.ideal) {
            (None, IdealChoice::Fin) => IdealSpec::Fin,
            (None, IdealChoice::Density) => IdealSpec::Density,
            (Some(_), _) => IdealSpec::TalagrandGiven(self.sequence()),
        }
    }

    fn indices(&self) -> Result<Option<Vec<usize>>, CliError> {
        let Some(s) = &self.stem else { return Ok(None) };
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| CliError::Config(format!("stem entry `{t}` is not a positive integer"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// U for subsequence constructions; B_m defaults to (1,…,m+1).
    pub fn open_subseq(&self) -> Result<SubseqStem, CliError> {
        Ok(match self.indices()? {
            Some(v) => SubseqStem::new(v)?,
            None if self.construction == Task::DenseOpenBm => SubseqStem::identity(self.m + 1),
            None => SubseqStem::default(),
        })
    }

    /// V for rearrangement constructions; C_m defaults to (1,…,m+1).
    pub fn open_rearr(&self) -> Result<RearrStem, CliError> {
        Ok(match self.indices()? {
            Some(v) => RearrStem::new(v)?,
            None if self.construction == Task::DenseOpenCm => RearrStem::identity(self.m + 1),
            None => RearrStem::default(),
        })
    }

    /// 0-1 stem for `dense-open-am` and the selection evaluated by `i-bounded`.
    pub fn selection(&self) -> Result<Option<SelectionStem>, CliError> {
        self.stem.as_deref().map(|s| s.parse::<SelectionStem>().map_err(CliError::from)).transpose()
    }

    /// Rejects parameters that violate the construction's preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.horizon == Some(0) {
            return bad("horizon must be at least 1".into());
        }
        match self.construction {
            Task::GrowSubseries if !(self.target.is_finite() && self.target > 0.0) => {
                bad(format!("grow-subseries needs a finite target > 0, got {}", self.target))
            }
            Task::NowhereSubseq | Task::DenseOpenBm => {
                let u = self.open_subseq()?;
                if self.construction == Task::DenseOpenBm && u.len() <= self.m {
                    return bad(format!("dense-open-bm needs a stem of length r > m = {}, got r = {}", self.m, u.len()));
                }
                Ok(())
            }
            Task::NowhereRearr | Task::DenseOpenCm => {
                let v = self.open_rearr()?;
                if self.construction == Task::DenseOpenCm && v.len() <= self.m {
                    return bad(format!("dense-open-cm needs a stem of length r > m = {}, got r = {}", self.m, v.len()));
                }
                Ok(())
            }
            Task::DenseOpenAm => self.selection().map(|_| ()),
            Task::UniformBound if self.n > MAX_PATTERN_LEN => {
                bad(format!("uniform-bound enumerates all words, so n <= {MAX_PATTERN_LEN} (got {})", self.n))
            }
            Task::IBounded => {
                if !(self.big_m.is_finite() && self.big_m >= 0.0) {
                    return bad(format!("i-bounded needs a finite M >= 0, got {}", self.big_m));
                }
                if let (Some(sel), Some(h)) = (self.selection()?, self.horizon) {
                    if sel.len() < h {
                        return bad(format!("the selection stem has length {} < horizon {h}", sel.len()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
