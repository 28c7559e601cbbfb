//! Normed-space arithmetic on finitely supported vectors.
//!
//! Three concrete models stand in for the ambient Banach space: the real
//! line, `d`-dimensional ℓ^p, and sequence spaces with an ℓ^p or sup norm.
//! The sup-norm sequence space restricted to finite supports is the model
//! of c₀ used throughout the crate. Coordinates are 1-based.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Either a finite exponent `p ≥ 1` or `p = ∞` (sup norm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Err(Error::InvalidSpace(format!("exponent {p} is below 1")))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// ℝ with the absolute value. Vectors live on coordinate 1.
    RealLine,
    /// ℝ^d with the ℓ^p norm.
    Euclidean { dim: usize, p: Exponent },
    /// Finitely supported real sequences with the ℓ^p or sup norm.
    Sequence { p: Exponent },
}

impl SpaceSpec {
    pub fn euclidean(dim: usize, p: Exponent) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("euclidean dimension must be at least 1".into()));
        }
        Ok(SpaceSpec::Euclidean { dim, p })
    }

    /// The c₀ model: sequences under the sup norm.
    pub fn c0() -> Self {
        SpaceSpec::Sequence { p: Exponent::Infinity }
    }

    /// Dimension, or `None` for sequence spaces.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SpaceSpec::RealLine => Some(1),
            SpaceSpec::Euclidean { dim, .. } => Some(*dim),
            SpaceSpec::Sequence { .. } => None,
        }
    }

    pub fn exponent(&self) -> Exponent {
        match self {
            // every ℓ^p norm on ℝ is the absolute value
            SpaceSpec::RealLine => Exponent::Infinity,
            SpaceSpec::Euclidean { p, .. } | SpaceSpec::Sequence { p } => *p,
        }
    }

    /// One-dimensional spaces, where sign-based strategies make sense.
    pub fn is_scalar(&self) -> bool {
        self.dim() == Some(1)
    }

    pub fn check(&self, v: &FiniteSupportVector) -> Result<()> {
        if let (Some(dim), Some(top)) = (self.dim(), v.max_index()) {
            if top > dim {
                return Err(Error::DimensionMismatch { index: top, dim });
            }
        }
        Ok(())
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::RealLine => write!(f, "real line"),
            SpaceSpec::Euclidean { dim, p } => write!(f, "l^{p} on R^{dim}"),
            SpaceSpec::Sequence { p: Exponent::Infinity } => write!(f, "c0 (sup norm)"),
            SpaceSpec::Sequence { p } => write!(f, "l^{p} sequences"),
        }
    }
}

/// A sparse vector: 1-based coordinate → nonzero coefficient.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FiniteSupportVector {
    entries: BTreeMap<usize, f64>,
}

impl FiniteSupportVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector e_i.
    pub fn unit(i: usize) -> Self {
        Self::from_entries([(i, 1.0)])
    }

    /// A real number, stored on coordinate 1.
    pub fn scalar(x: f64) -> Self {
        Self::from_entries([(1, x)])
    }

    /// Builds a vector, summing repeated coordinates and dropping zeros.
    ///
    /// Panics on coordinate 0, since coordinates are 1-based.
    pub fn from_entries<I: IntoIterator<Item = (usize, f64)>>(entries: I) -> Self {
        let mut v = Self::zero();
        for (i, c) in entries {
            v.add_at(i, c);
        }
        v
    }

    fn add_at(&mut self, i: usize, c: f64) {
        assert!(i >= 1, "coordinates are 1-based");
        let slot = self.entries.entry(i).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.entries.remove(&i);
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_entries(self.iter().map(|(i, c)| (i, a * c)))
    }
}

/// ℓ^p or sup norm of `v` in `space`.
pub fn norm(space: &SpaceSpec, v: &FiniteSupportVector) -> Result<f64> {
    space.check(v)?;
    Ok(raw_norm(space.exponent(), v.entries.values().copied()))
}

fn raw_norm(p: Exponent, coeffs: impl Iterator<Item = f64> + Clone) -> f64 {
    let top = coeffs.clone().fold(0.0_f64, |m, c| m.max(c.abs()));
    match p {
        Exponent::Infinity => top,
        _ if top == 0.0 => 0.0,
        Exponent::Finite(1.0) => coeffs.map(f64::abs).sum(),
        // scale by the largest entry so large coefficients do not overflow
        Exponent::Finite(p) => {
            let s: f64 = coeffs.map(|c| (c.abs() / top).powf(p)).sum();
            top * s.powf(p.recip())
        }
    }
}

/// `a·v + w`, with cancelled coordinates removed.
pub fn axpy(a: f64, v: &FiniteSupportVector, w: &FiniteSupportVector) -> FiniteSupportVector {
    let mut out = w.clone();
    for (i, c) in v.iter() {
        out.add_at(i, a * c);
    }
    out
}

/// A mutable accumulator for partial sums with a cheap norm query.
///
/// One-dimensional spaces keep a plain `f64`. Sup-norm sequence spaces keep
/// a multiset of coefficient magnitudes so the norm is the largest key.
#[derive(Debug, Clone)]
pub struct RunningSum {
    space: SpaceSpec,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Scalar(f64),
    Sparse {
        v: FiniteSupportVector,
        // |coefficient| bit pattern → multiplicity; only for sup norms
        mags: Option<BTreeMap<u64, u32>>,
    },
}

impl RunningSum {
    pub fn new(space: SpaceSpec) -> Self {
        let repr = if space.is_scalar() {
            Repr::Scalar(0.0)
        } else {
            let mags = matches!(space.exponent(), Exponent::Infinity).then(BTreeMap::new);
            Repr::Sparse { v: FiniteSupportVector::zero(), mags }
        };
        RunningSum { space, repr }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    /// Adds `a·x` where `x` is a real number on coordinate 1.
    pub fn add_scalar(&mut self, a: f64, x: f64) {
        match &mut self.repr {
            Repr::Scalar(s) => *s += a * x,
            Repr::Sparse { .. } => self.add_coord(1, a * x),
        }
    }

    /// Adds `a·x`. The caller guarantees `x` fits the space.
    pub fn add_vector(&mut self, a: f64, x: &FiniteSupportVector) {
        if let Repr::Scalar(s) = &mut self.repr {
            *s += a * x.get(1);
            return;
        }
        for (i, c) in x.iter() {
            self.add_coord(i, a * c);
        }
    }

    fn add_coord(&mut self, i: usize, delta: f64) {
        let Repr::Sparse { v, mags } = &mut self.repr else {
            unreachable!("scalar sums have no coordinates")
        };
        let old = v.get(i);
        v.add_at(i, delta);
        let new = v.get(i);
        if let Some(mags) = mags {
            if old != 0.0 {
                let key = old.abs().to_bits();
                if let Some(count) = mags.get_mut(&key) {
                    *count -= 1;
                    if *count == 0 {
                        mags.remove(&key);
                    }
                }
            }
            if new != 0.0 {
                *mags.entry(new.abs().to_bits()).or_insert(0) += 1;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        match &self.repr {
            Repr::Scalar(s) => s.abs(),
            Repr::Sparse { mags: Some(mags), .. } => {
                mags.keys().next_back().map_or(0.0, |&b| f64::from_bits(b))
            }
            Repr::Sparse { v, mags: None } => raw_norm(self.space.exponent(), v.entries.values().copied()),
        }
    }

    pub fn to_vector(&self) -> FiniteSupportVector {
        match &self.repr {
            Repr::Scalar(s) => FiniteSupportVector::scalar(*s),
            Repr::Sparse { v, .. } => v.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-9;

    fn l2(d: usize) -> SpaceSpec {
        SpaceSpec::euclidean(d, Exponent::Finite(2.0)).unwrap()
    }

    #[test]
    fn norm_examples() {
        let v = axpy(1.0, &FiniteSupportVector::unit(1), &FiniteSupportVector::unit(3));
        assert_eq!(norm(&SpaceSpec::c0(), &v).unwrap(), 1.0);
        assert_eq!(norm(&SpaceSpec::RealLine, &FiniteSupportVector::scalar(-0.5)).unwrap(), 0.5);
        let v = FiniteSupportVector::from_entries([(1, 3.0), (2, 4.0)]);
        assert_eq!(norm(&l2(2), &v).unwrap(), 5.0);
        assert_eq!(norm(&l2(2), &FiniteSupportVector::zero()).unwrap(), 0.0);
    }

    #[test]
    fn norm_rejects_support_beyond_dimension() {
        let v = FiniteSupportVector::unit(3);
        assert_eq!(norm(&l2(2), &v), Err(Error::DimensionMismatch { index: 3, dim: 2 }));
        assert!(norm(&SpaceSpec::RealLine, &FiniteSupportVector::unit(2)).is_err());
    }

    #[test]
    fn invalid_spaces() {
        assert!(SpaceSpec::euclidean(0, Exponent::Infinity).is_err());
        assert!(Exponent::finite(0.5).is_err());
        assert_eq!(Exponent::finite(f64::INFINITY).unwrap(), Exponent::Infinity);
    }

    #[test]
    fn l1_and_l3() {
        let v = FiniteSupportVector::from_entries([(1, 1.0), (2, -2.0)]);
        let l1 = SpaceSpec::Sequence { p: Exponent::Finite(1.0) };
        assert_eq!(norm(&l1, &v).unwrap(), 3.0);
        let l3 = SpaceSpec::Sequence { p: Exponent::Finite(3.0) };
        assert!((norm(&l3, &v).unwrap() - 9f64.cbrt()).abs() < EPS);
    }

    #[test]
    fn axpy_examples() {
        let e1 = FiniteSupportVector::unit(1);
        let e2 = FiniteSupportVector::unit(2);
        assert_eq!(axpy(1.0, &e1, &e1), FiniteSupportVector::from_entries([(1, 2.0)]));
        let z = axpy(-1.0, &e2, &e2);
        assert!(z.is_zero());
        assert_eq!(z.support_len(), 0);
        assert_eq!(axpy(0.5, &e1, &e2), FiniteSupportVector::from_entries([(1, 0.5), (2, 1.0)]));
    }

    #[test]
    fn running_sum_tracks_sup_norm_through_cancellation() {
        let mut acc = RunningSum::new(SpaceSpec::c0());
        acc.add_vector(1.0, &FiniteSupportVector::unit(1));
        acc.add_vector(3.0, &FiniteSupportVector::unit(2));
        assert_eq!(acc.norm(), 3.0);
        acc.add_vector(-3.0, &FiniteSupportVector::unit(2));
        assert_eq!(acc.norm(), 1.0);
        acc.add_vector(-1.0, &FiniteSupportVector::unit(1));
        assert_eq!(acc.norm(), 0.0);
        assert!(acc.to_vector().is_zero());
    }

    fn sparse_vec() -> impl Strategy<Value = FiniteSupportVector> {
        prop::collection::vec((1usize..12, -100.0f64..100.0), 0..8)
            .prop_map(FiniteSupportVector::from_entries)
    }

    fn space() -> impl Strategy<Value = SpaceSpec> {
        prop_oneof![
            Just(SpaceSpec::c0()),
            Just(SpaceSpec::Sequence { p: Exponent::Finite(1.0) }),
            Just(SpaceSpec::Sequence { p: Exponent::Finite(2.0) }),
            (1.0f64..6.0).prop_map(|p| SpaceSpec::Sequence { p: Exponent::Finite(p) }),
        ]
    }

    proptest! {
        #[test]
        fn triangle_inequality(sp in space(), v in sparse_vec(), w in sparse_vec()) {
            let sum = axpy(1.0, &v, &w);
            let (nv, nw, ns) = (norm(&sp, &v).unwrap(), norm(&sp, &w).unwrap(), norm(&sp, &sum).unwrap());
            prop_assert!(ns <= nv + nw + EPS * (1.0 + nv + nw));
            prop_assert!(ns + EPS * (1.0 + nv + nw) >= (nv - nw).abs());
        }

        #[test]
        fn symmetric(sp in space(), v in sparse_vec()) {
            let diff = norm(&sp, &v).unwrap() - norm(&sp, &v.scaled(-1.0)).unwrap();
            prop_assert!(diff.abs() <= EPS);
        }

        #[test]
        fn no_zero_stored(a in -3.0f64..3.0, v in sparse_vec(), w in sparse_vec()) {
            let out = axpy(a, &v, &w);
            prop_assert!(out.iter().all(|(_, c)| c != 0.0));
            let cancelled = axpy(-1.0, &v, &v);
            prop_assert!(cancelled.is_zero());
        }

        #[test]
        fn running_sum_agrees_with_norm(sp in space(), vs in prop::collection::vec((sparse_vec(), -2.0f64..2.0), 0..10)) {
            let mut acc = RunningSum::new(sp);
            let mut direct = FiniteSupportVector::zero();
            for (v, a) in &vs {
                acc.add_vector(*a, v);
                direct = axpy(*a, v, &direct);
            }
            let expected = norm(&sp, &direct).unwrap();
            prop_assert!((acc.norm() - expected).abs() <= EPS * (1.0 + expected));
        }
    }
}
