//! Feature subsets encoded as 64-bit masks.

use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use crate::error::{Error, Result};

/// A subset of feature indices `{0, .., 63}`.
///
/// The empty set names the intercept component.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const CAPACITY: usize = 64;
    pub const EMPTY: FeatureSet = FeatureSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Panics if `feature >= 64`.
    pub fn singleton(feature: usize) -> Self {
        assert!(feature < Self::CAPACITY, "feature index {feature} exceeds capacity");
        FeatureSet(1u64 << feature)
    }

    pub fn try_from_indices<I: IntoIterator<Item = usize>>(features: I) -> Result<Self> {
        let mut set = FeatureSet::EMPTY;
        for f in features {
            if f >= Self::CAPACITY {
                return Err(Error::TooManyFeatures {
                    d: f + 1,
                    max: Self::CAPACITY,
                });
            }
            set.0 |= 1 << f;
        }
        Ok(set)
    }

    /// The set `{0, .., d-1}`.
    pub fn full(d: usize) -> Self {
        assert!(d <= Self::CAPACITY);
        if d == Self::CAPACITY {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << d) - 1)
        }
    }

    pub fn insert(&mut self, feature: usize) {
        *self = *self | FeatureSet::singleton(feature);
    }

    pub fn contains(self, feature: usize) -> bool {
        feature < Self::CAPACITY && self.0 >> feature & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: FeatureSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: FeatureSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Largest index in the set.
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> Indices {
        Indices(self.0)
    }

    /// All subsets, from the set itself down to the empty set.
    pub fn submasks(self) -> Submasks {
        Submasks {
            mask: self.0,
            next: Some(self.0),
        }
    }

    /// `(-1)^|S|` as a sign flag: true when the cardinality is odd.
    pub fn is_odd(self) -> bool {
        self.0.count_ones() & 1 == 1
    }
}

impl BitOr for FeatureSet {
    type Output = FeatureSet;
    fn bitor(self, rhs: Self) -> Self {
        FeatureSet(self.0 | rhs.0)
    }
}

impl BitAnd for FeatureSet {
    type Output = FeatureSet;
    fn bitand(self, rhs: Self) -> Self {
        FeatureSet(self.0 & rhs.0)
    }
}

/// Set difference.
impl Sub for FeatureSet {
    type Output = FeatureSet;
    fn sub(self, rhs: Self) -> Self {
        FeatureSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

impl IntoIterator for FeatureSet {
    type Item = usize;
    type IntoIter = Indices;
    fn into_iter(self) -> Indices {
        self.iter()
    }
}

#[derive(Clone, Debug)]
pub struct Indices(u64);

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let k = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(k)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Indices {}

/// Descending submask enumeration `sub = (sub - 1) & mask`.
#[derive(Clone, Debug)]
pub struct Submasks {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Submasks {
    type Item = FeatureSet;

    fn next(&mut self) -> Option<FeatureSet> {
        let cur = self.next?;
        self.next = (cur != 0).then(|| cur.wrapping_sub(1) & self.mask);
        Some(FeatureSet(cur))
    }
}

/// Stable label for a subset: member names sorted and joined with `:`.
/// The empty set (intercept) is the empty string.
pub fn subset_label(set: FeatureSet, names: &[String]) -> String {
    let mut parts: Vec<&str> = set
        .iter()
        .map(|k| names.get(k).map(String::as_str).unwrap_or(""))
        .collect();
    parts.sort_unstable();
    parts.join(":")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks_cover_power_set_once() {
        let s = FeatureSet::try_from_indices([1, 4, 7]).unwrap();
        let subs: Vec<_> = s.submasks().collect();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs.first(), Some(&s));
        assert_eq!(subs.last(), Some(&FeatureSet::EMPTY));
        let mut bits: Vec<u64> = subs.iter().map(|x| x.bits()).collect();
        bits.dedup();
        assert_eq!(bits.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset_of(s)));
    }

    #[test]
    fn empty_set_has_single_submask() {
        assert_eq!(FeatureSet::EMPTY.submasks().count(), 1);
    }

    #[test]
    fn full_capacity_set() {
        let s = FeatureSet::full(64);
        assert_eq!(s.len(), 64);
        assert_eq!(s.max(), Some(63));
        assert!(FeatureSet::try_from_indices([64]).is_err());
    }

    #[test]
    fn labels_sort_names() {
        let names: Vec<String> = ["temp", "hr", "workingday"].iter().map(|s| s.to_string()).collect();
        let s = FeatureSet::try_from_indices([0, 1]).unwrap();
        assert_eq!(subset_label(s, &names), "hr:temp");
        assert_eq!(subset_label(FeatureSet::EMPTY, &names), "");
    }

    #[test]
    fn set_algebra() {
        let a = FeatureSet::try_from_indices([0, 2, 3]).unwrap();
        let b = FeatureSet::try_from_indices([2, 5]).unwrap();
        assert_eq!((a - b).iter().collect::<Vec<_>>(), vec![0, 3]);
        assert_eq!((a & b).iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!((a | b).len(), 4);
        assert!(a.intersects(b));
        assert_eq!(a.to_string(), "{0,2,3}");
    }
}
