//! Driver behind the `serieswit` binary: runs catalog scenarios, writes
//! JSON certificate documents and re-checks them.

use std::path::PathBuf;

use thiserror::Error;

use serieswit::series::{series_of, CatalogSeries};
use serieswit::witnesses::CertificateFault;

pub mod config;
pub mod document;
pub mod pipeline;
pub mod verify;

pub use config::{IdealChoice, RunConfig, Task, TalagrandChoice, HORIZON_ENV};
pub use document::{CertificateDocument, DocVerdict, EncodedStem, SCHEMA_VERSION};
pub use pipeline::{run, RunOutcome};
pub use verify::{verify_document, verify_path, VerifyOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
/// A search ran past its horizon: evidence of boundedness, not a failure.
pub const EXIT_EXHAUSTED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] serieswit::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("schema mismatch: document has schema version {found}, this build reads version {SCHEMA_VERSION}")]
    SchemaMismatch { found: String },

    #[error("certificate rejected: {0}")]
    Fault(#[from] CertificateFault),

    #[error("freshly built certificate failed re-verification: {0}")]
    SelfCheck(CertificateFault),

    #[error("recorded result differs from recomputation: {0}")]
    Mismatch(String),
}

/// One line per catalog series: name, space, metadata claims, definition.
pub fn catalog_table() -> String {
    let mut out = format!("{:<20} {:<14} {:<16} {:<16} {}\n", "series", "space", "liminf ||x||=0", "limsup ||x||=inf", "terms");
    for kind in CatalogSeries::ALL {
        let s = series_of(kind);
        let meta = s.metadata();
        out.push_str(&format!(
            "{:<20} {:<14} {:<16} {:<16} {}\n",
            kind.name(),
            s.space().to_string(),
            meta.liminf_norm_zero,
            meta.limsup_norm_infinite,
            kind.description()
        ));
    }
    out
}
