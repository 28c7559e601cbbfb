//! Exhaustive pattern sweeps over short prefixes of a series.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::SeriesOracle;
use crate::spaces::RunningSum;

/// Largest n accepted by [`uniform_bound_bruteforce`].
pub const MAX_PATTERN_LEN: usize = 14;
/// Largest n accepted by [`rearrangement_prefix_bound`].
pub const MAX_PERMUTATION_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alphabet {
    /// t : {1..n} → {0, 1}
    Binary,
    /// t : {1..n} → {−1, 0, 1}
    Signed,
}

impl Alphabet {
    fn letters(self) -> &'static [f64] {
        match self {
            Alphabet::Binary => &[0.0, 1.0],
            Alphabet::Signed => &[-1.0, 0.0, 1.0],
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alphabet::Binary => "binary",
            Alphabet::Signed => "signed",
        })
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "01" => Ok(Alphabet::Binary),
            "signed" | "-101" => Ok(Alphabet::Signed),
            _ => Err(Error::Unsupported(format!("unknown alphabet `{s}`"))),
        }
    }
}

/// max over t ∈ alphabet^n of ‖Σ_{i=1}^n t(i)xᵢ‖.
pub fn uniform_bound_bruteforce(series: &SeriesOracle, n: usize, alphabet: Alphabet) -> Result<f64> {
    if n > MAX_PATTERN_LEN {
        return Err(Error::NTooLarge { n, limit: MAX_PATTERN_LEN });
    }
    fn walk(series: &SeriesOracle, pos: usize, n: usize, letters: &[f64], acc: &RunningSum, best: &mut f64) {
        if pos > n {
            *best = best.max(acc.norm());
            return;
        }
        for &t in letters {
            let mut next = acc.clone();
            series.add_term(&mut next, pos, t);
            walk(series, pos + 1, n, letters, &next, best);
        }
    }
    let mut best = 0.0;
    walk(series, 1, n, alphabet.letters(), &RunningSum::new(*series.space()), &mut best);
    Ok(best)
}

/// max over injective sequences p of length ≤ n drawn from {1..n} of
/// ‖Σ_{i} x_{p(i)}‖, i.e. every partial sum of every rearrangement of the
/// first n terms.
pub fn rearrangement_prefix_bound(series: &SeriesOracle, n: usize) -> Result<f64> {
    if n > MAX_PERMUTATION_LEN {
        return Err(Error::NTooLarge { n, limit: MAX_PERMUTATION_LEN });
    }
    fn walk(series: &SeriesOracle, n: usize, used: &mut [bool], acc: &RunningSum, best: &mut f64) {
        *best = best.max(acc.norm());
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                let mut next = acc.clone();
                series.add_term(&mut next, v, 1.0);
                walk(series, n, used, &next, best);
                used[v] = false;
            }
        }
    }
    let mut best = 0.0;
    let mut used = vec![false; n + 1];
    walk(series, n, &mut used, &RunningSum::new(*series.space()), &mut best);
    Ok(best)
}
