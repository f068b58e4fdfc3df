//! Subsets of a ground set `[n]`, `n <= 64`, stored as bitmasks.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_GROUND: usize = 64;

/// A subset of `{1, ..., 64}`; element `i` lives in bit `i - 1`.
///
/// The order is by size first, then lexicographic on the ascending index
/// lists, which is the canonical order for presentation members.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!((1..=MAX_GROUND).contains(&i));
        Subset(1u64 << (i - 1))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut bits = 0u64;
        for i in indices {
            if !(1..=MAX_GROUND).contains(&i) {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: MAX_GROUND,
                });
            }
            bits |= 1u64 << (i - 1);
        }
        Ok(Subset(bits))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_GROUND).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        self | Subset::singleton(i)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1u64 << (i - 1)))
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn smallest(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn largest(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Ascending 1-based elements.
    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Image under a relabeling `sigma`, where `sigma[i - 1]` is the image
    /// of `i`.
    pub fn map(self, sigma: &[usize]) -> Subset {
        let mut bits = 0u64;
        for i in self.iter() {
            bits |= 1u64 << (sigma[i - 1] - 1);
        }
        Subset(bits)
    }

    /// Text form used in presentations: digits run together when every
    /// element is below 10 and `wide` is false, otherwise `[a b c]`.
    pub fn format(self, wide: bool) -> String {
        if wide || self.largest().is_some_and(|m| m >= 10) {
            let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
            format!("[{}]", parts.join(" "))
        } else {
            self.iter().map(|i| i.to_string()).collect()
        }
    }
}

pub struct SubsetIter(u64);

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SubsetIter {}

impl IntoIterator for Subset {
    type Item = usize;
    type IntoIter = SubsetIter;

    fn into_iter(self) -> SubsetIter {
        self.iter()
    }
}

impl std::ops::BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for Subset {
    fn bitor_assign(&mut self, rhs: Subset) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl std::ops::Sub for Subset {
    type Output = Subset;
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(false))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.format(true).trim_matches(|c| c == '[' || c == ']')
        )
    }
}

/// All `r`-element subsets of `[n]` in increasing lexicographic order.
pub fn combinations(n: usize, r: usize) -> Vec<Subset> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (1..=r).collect();
    loop {
        out.push(Subset::from_indices(idx.iter().copied()).expect("indices in range"));
        let Some(pos) = (0..r).rev().find(|&p| idx[p] < n - (r - 1 - p)) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}
