//! Partial sums of subseries, rearrangements and 0-1 selections of series
//! in normed spaces, ideal-boundedness evidence, and checkable witnesses
//! for the category constructions.

pub mod error;
pub mod ideals;
pub mod series;
pub mod spaces;
pub mod witnesses;

pub use error::{Error, Result};
