//! Fixed-width bit sets indexing the atoms of a finite space.
//!
//! Event membership is a subset of atom indices. Sets carry their
//! universe width so complementation is well defined without a space
//! reference, and they order lexicographically as unsigned integers
//! (most significant word first), which is the deterministic enumeration
//! order used throughout.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    nbits: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(nbits: usize) -> Self {
        let nwords = nbits.div_ceil(64).max(1);
        BitSet { nbits, words: vec![0; nwords] }
    }

    pub fn full(nbits: usize) -> Self {
        let mut s = Self::empty(nbits);
        for i in 0..nbits {
            s.insert(i);
        }
        s
    }

    /// The set with the given indices present.
    pub fn from_indices(nbits: usize, indices: impl IntoIterator<Item = usize>) -> Option<Self> {
        let mut s = Self::empty(nbits);
        for i in indices {
            if i >= nbits {
                return None;
            }
            s.insert(i);
        }
        Some(s)
    }

    /// Interprets the low `nbits` of `value` as a set; bit i = atom i.
    /// Only meaningful for universes of at most 64 atoms.
    pub fn from_word(nbits: usize, value: u64) -> Self {
        debug_assert!(nbits <= 64);
        let mut s = Self::empty(nbits);
        s.words[0] = if nbits == 64 { value } else { value & ((1u64 << nbits) - 1) };
        s
    }

    pub fn universe_len(&self) -> usize {
        self.nbits
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.nbits && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.nbits
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(move |&i| self.contains(i))
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        debug_assert_eq!(self.nbits, other.nbits);
        BitSet {
            nbits: self.nbits,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a ^ b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let mut out = BitSet {
            nbits: self.nbits,
            words: self.words.iter().map(|&w| !w).collect(),
        };
        out.trim();
        out
    }

    /// Clears bits beyond the universe width.
    fn trim(&mut self) {
        let rem = self.nbits % 64;
        if rem != 0 {
            let last = self.nbits / 64;
            self.words[last] &= (1u64 << rem) - 1;
        }
        for w in self.words.iter_mut().skip(self.nbits.div_ceil(64).max(1)) {
            *w = 0;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0)
    }
}

impl Ord for BitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
