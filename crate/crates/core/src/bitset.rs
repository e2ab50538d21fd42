//! Fixed-universe bitsets used as range membership vectors.

use std::cmp::Ordering;
use std::fmt;

const WORD_BITS: usize = 64;

/// A set of indices drawn from a fixed universe `[0, len)`.
///
/// Equality and hashing are over the universe size and the member bits.
/// `Ord` is the lexicographic order of the ascending member lists, so
/// `{0} < {0, 1} < {1}`, matching how `Vec<Vec<usize>>` would sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    /// Builds a bitset from indices; panics if an index is out of range.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut set = Bitset::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Universe size.
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "index {i} outside universe of size {}", self.len);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "index {i} outside universe of size {}", self.len);
        self.words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Size of the symmetric difference with `other`.
    pub fn symmetric_difference_count(&self, other: &Bitset) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn intersection_count(&self, other: &Bitset) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// In-place union.
    pub fn union_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Complement within the universe.
    pub fn complement(&self) -> Bitset {
        let mut out = Bitset {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// True if some member is strictly greater than `i`.
    fn has_member_above(&self, i: usize) -> bool {
        let w = i / WORD_BITS;
        let b = i % WORD_BITS;
        let mask = if b == WORD_BITS - 1 { 0 } else { !0u64 << (b + 1) };
        self.words[w] & mask != 0 || self.words[w + 1..].iter().any(|&x| x != 0)
    }
}

impl Ord for Bitset {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len.cmp(&other.len) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Member lists agree below the first differing index `d`. The list
        // holding `d` is smaller unless the other list has already ended.
        for (w, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let diff = a ^ b;
            if diff == 0 {
                continue;
            }
            let d = w * WORD_BITS + diff.trailing_zeros() as usize;
            return if self.contains(d) {
                if other.has_member_above(d) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            } else if self.has_member_above(d) {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        Ordering::Equal
    }
}

impl PartialOrd for Bitset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterator over the members of a [`Bitset`] in ascending order.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.cur == 0 {
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
        let bit = self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        Some(self.idx * WORD_BITS + bit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_membership() {
        let mut s = Bitset::new(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.to_vec(), vec![0, 64, 129]);
        assert_eq!(s.count(), 3);
        s.remove(64);
        assert!(!s.contains(64));
        assert_eq!(s.complement().count(), 128);
    }

    #[test]
    fn member_list_order() {
        let a = Bitset::from_indices(4, [0]);
        let b = Bitset::from_indices(4, [0, 1]);
        let c = Bitset::from_indices(4, [1]);
        assert!(a < b && b < c);
    }

    proptest! {
        #[test]
        fn order_matches_sorted_vectors(
            x in proptest::collection::btree_set(0usize..150, 0..20),
            y in proptest::collection::btree_set(0usize..150, 0..20),
        ) {
            let a = Bitset::from_indices(150, x.iter().copied());
            let b = Bitset::from_indices(150, y.iter().copied());
            let va: Vec<usize> = x.into_iter().collect();
            let vb: Vec<usize> = y.into_iter().collect();
            prop_assert_eq!(a.cmp(&b), va.cmp(&vb));
            let sym = va.iter().filter(|i| !vb.contains(i)).count()
                + vb.iter().filter(|i| !va.contains(i)).count();
            prop_assert_eq!(a.symmetric_difference_count(&b), sym);
        }
    }
}
