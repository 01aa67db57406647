//! Finite classical probability spaces with exact rational weights.
//!
//! A space is an ordered list of named atoms; an event is a subset of the
//! atom indices tagged with the identity of its owning space, so that
//! mixing events across spaces is a checked error instead of silent
//! nonsense. Everything is immutable after construction and every
//! operation is a pure function.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::CcError;
use crate::rational::{is_probability, Rat};

/// Default cap on atom counts for operations that enumerate all events
/// (there are 2^n of them).
pub const DEFAULT_ENUM_LIMIT: usize = 16;

/// Event measures as integer numerators over one common denominator.
/// Machine words when the denominator fits, big integers otherwise.
pub(crate) enum IntMeasures {
    Small { num: Vec<u64>, den: u64 },
    Big { num: Vec<num_bigint::BigInt>, den: num_bigint::BigInt },
}

impl IntMeasures {
    /// μ(a∧b) > μ(a)·μ(b), scaled through the common denominator.
    pub(crate) fn correlated(&self, ma: u64, mb: u64) -> bool {
        match self {
            IntMeasures::Small { num, den } => {
                num[(ma & mb) as usize] as u128 * *den as u128
                    > num[ma as usize] as u128 * num[mb as usize] as u128
            }
            IntMeasures::Big { num, den } => {
                &num[(ma & mb) as usize] * den > &num[ma as usize] * &num[mb as usize]
            }
        }
    }
}

/// Identity tag of an [`AtomicSpace`]; fresh for every constructed space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(u64);

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_space_id() -> SpaceId {
    SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed))
}

#[derive(Debug, Clone)]
pub struct AtomicSpace {
    id: SpaceId,
    names: Vec<String>,
    weights: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    space: SpaceId,
    bits: BitSet,
}

impl AtomicSpace {
    /// Builds a space from `(name, weight)` pairs. Weights must be exact
    /// probabilities summing to one; names must be unique and non-empty.
    /// Zero-weight atoms are allowed.
    pub fn new(atoms: Vec<(String, Rat)>) -> Result<Self, CcError> {
        if atoms.is_empty() {
            return Err(CcError::InvalidSpace { reason: "no atoms".into() });
        }
        let mut total = Rat::zero();
        for (name, w) in &atoms {
            if name.is_empty() {
                return Err(CcError::InvalidSpace { reason: "empty atom name".into() });
            }
            if !is_probability(w) {
                return Err(CcError::InvalidSpace {
                    reason: format!("weight of {name:?} outside [0,1]"),
                });
            }
            total += w;
        }
        if !total.is_one() {
            return Err(CcError::InvalidSpace {
                reason: format!("weights sum to {total}, not 1"),
            });
        }
        let mut sorted: Vec<&String> = atoms.iter().map(|(n, _)| n).collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CcError::InvalidSpace { reason: "duplicate atom name".into() });
        }
        let (names, weights) = atoms.into_iter().unzip();
        Ok(AtomicSpace { id: fresh_space_id(), names, weights })
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn atom_count(&self) -> usize {
        self.names.len()
    }

    pub fn atom_name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn atom_names(&self) -> &[String] {
        &self.names
    }

    pub fn atom_weight(&self, index: usize) -> &Rat {
        &self.weights[index]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    // ---- event constructors ---------------------------------------------

    pub fn empty_event(&self) -> Event {
        Event { space: self.id, bits: BitSet::empty(self.atom_count()) }
    }

    pub fn full_event(&self) -> Event {
        Event { space: self.id, bits: BitSet::full(self.atom_count()) }
    }

    pub fn event_from_indices(
        &self,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Event, CcError> {
        let n = self.atom_count();
        let indices: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(CcError::BadAtomIndex { index: bad, atom_count: n });
        }
        Ok(Event { space: self.id, bits: BitSet::from_indices(n, indices).unwrap() })
    }

    pub fn event_from_bits(&self, bits: BitSet) -> Result<Event, CcError> {
        if bits.universe_len() != self.atom_count() {
            return Err(CcError::ForeignEvent);
        }
        Ok(Event { space: self.id, bits })
    }

    /// Interprets the low bits of `mask` as atom membership; only valid
    /// for spaces of at most 64 atoms.
    pub fn event_from_mask(&self, mask: u64) -> Event {
        debug_assert!(self.atom_count() <= 64);
        Event { space: self.id, bits: BitSet::from_word(self.atom_count(), mask) }
    }

    pub fn event_from_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Event, CcError> {
        let mut indices = Vec::new();
        for name in names {
            match self.atom_index(name) {
                Some(i) => indices.push(i),
                None => return Err(CcError::UnknownName { name: name.to_string() }),
            }
        }
        self.event_from_indices(indices)
    }

    /// All 2^n events in ascending bitmask order. Errors above `limit`.
    pub fn all_events(&self, limit: usize) -> Result<impl Iterator<Item = Event> + '_, CcError> {
        self.check_enum_limit(limit)?;
        let n = self.atom_count();
        Ok((0u64..(1u64 << n)).map(move |m| self.event_from_mask(m)))
    }

    pub fn check_enum_limit(&self, limit: usize) -> Result<(), CcError> {
        let n = self.atom_count();
        if n > limit || n >= 64 {
            return Err(CcError::AtomCountTooLarge { atom_count: n, limit });
        }
        Ok(())
    }

    fn check_owns(&self, e: &Event) -> Result<(), CcError> {
        if e.space != self.id {
            return Err(CcError::ForeignEvent);
        }
        Ok(())
    }

    // ---- measure and correlation ------------------------------------------

    /// Sum of the weights of the atoms in `e`.
    pub fn measure(&self, e: &Event) -> Result<Rat, CcError> {
        self.check_owns(e)?;
        let mut total = Rat::zero();
        for i in e.bits.iter() {
            total += &self.weights[i];
        }
        Ok(total)
    }

    /// Conditional probability of `x` given `y`.
    pub fn conditional(&self, x: &Event, y: &Event) -> Result<Rat, CcError> {
        self.check_owns(x)?;
        self.check_owns(y)?;
        let my = self.measure(y)?;
        if my.is_zero() {
            return Err(CcError::ConditionOnNull);
        }
        Ok(self.measure(&x.meet(y)?)? / my)
    }

    /// Covariance of the indicator variables of the two events; positive
    /// exactly when the pair is positively correlated.
    pub fn correlation(&self, a: &Event, b: &Event) -> Result<Rat, CcError> {
        self.check_owns(a)?;
        self.check_owns(b)?;
        let joint = self.measure(&a.meet(b)?)?;
        Ok(joint - self.measure(a)? * self.measure(b)?)
    }

    pub fn is_correlated(&self, a: &Event, b: &Event) -> Result<bool, CcError> {
        Ok(self.correlation(a, b)? > Rat::zero())
    }

    /// All unordered pairs of distinct events with positive correlation,
    /// excluding the trivial events 0 and 1, in ascending `(a, b)` bitmask
    /// order with `a < b`.
    pub fn list_correlated_pairs(&self, limit: usize) -> Result<Vec<(Event, Event)>, CcError> {
        self.check_enum_limit(limit)?;
        let n = self.atom_count();
        let count = 1u64 << n;
        let ints = self.integer_measures();
        let full = count - 1;
        let nested: Vec<Vec<(Event, Event)>> = (1..full)
            .into_par_iter()
            .map(|ma| {
                let mut out = Vec::new();
                for mb in (ma + 1)..full {
                    if ints.correlated(ma, mb) {
                        out.push((self.event_from_mask(ma), self.event_from_mask(mb)));
                    }
                }
                out
            })
            .collect();
        Ok(nested.into_iter().flatten().collect())
    }

    /// Measures of all 2^n events, indexed by bitmask.
    pub(crate) fn all_measures(&self) -> Vec<Rat> {
        let n = self.atom_count();
        debug_assert!(n < 64);
        let mut out = Vec::with_capacity(1 << n);
        out.push(Rat::zero());
        for mask in 1u64..(1u64 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = &out[(mask & (mask - 1)) as usize];
            out.push(rest + &self.weights[low]);
        }
        out
    }

    /// Integer form of [`Self::all_measures`]: numerators over one common
    /// denominator, for sweep inner loops that must not pay for rational
    /// normalization.
    pub(crate) fn integer_measures(&self) -> IntMeasures {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        let n = self.atom_count();
        let den = self
            .weights
            .iter()
            .fold(num_bigint::BigInt::from(1), |acc, w| acc.lcm(w.denom()));
        let scaled: Vec<num_bigint::BigInt> =
            self.weights.iter().map(|w| w.numer() * (&den / w.denom())).collect();
        let mut num = Vec::with_capacity(1 << n);
        num.push(num_bigint::BigInt::from(0));
        for mask in 1u64..(1u64 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = &num[(mask & (mask - 1)) as usize];
            num.push(rest + &scaled[low]);
        }
        match den.to_u64() {
            Some(d) => IntMeasures::Small {
                num: num
                    .iter()
                    .map(|x| x.to_u64().expect("numerator below denominator"))
                    .collect(),
                den: d,
            },
            None => IntMeasures::Big { num, den },
        }
    }

    /// Logical independence of two complement-closed event families: every
    /// pair of non-empty members must have a non-empty meet.
    pub fn logically_independent(&self, l1: &[Event], l2: &[Event]) -> Result<bool, CcError> {
        for (label, list) in [("l1", l1), ("l2", l2)] {
            for e in list {
                self.check_owns(e)?;
                if !list.iter().any(|f| f.bits == e.bits.complement()) {
                    return Err(CcError::NotComplementClosed { which: label.into() });
                }
            }
        }
        for a in l1.iter().filter(|e| !e.is_empty()) {
            for b in l2.iter().filter(|e| !e.is_empty()) {
                if a.bits.is_disjoint(&b.bits) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Event {
    /// Internal constructor for modules that build events of a space they
    /// know by id (embedding images, block masks).
    pub(crate) fn from_parts(space: SpaceId, bits: BitSet) -> Event {
        Event { space, bits }
    }

    pub fn space_id(&self) -> SpaceId {
        self.space
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn atom_indices(&self) -> Vec<usize> {
        self.bits.iter().collect()
    }

    fn check_same_space(&self, other: &Event) -> Result<(), CcError> {
        if self.space != other.space {
            return Err(CcError::ForeignEvent);
        }
        Ok(())
    }

    pub fn meet(&self, other: &Event) -> Result<Event, CcError> {
        self.check_same_space(other)?;
        Ok(Event { space: self.space, bits: self.bits.intersection(&other.bits) })
    }

    pub fn join(&self, other: &Event) -> Result<Event, CcError> {
        self.check_same_space(other)?;
        Ok(Event { space: self.space, bits: self.bits.union(&other.bits) })
    }

    pub fn complement(&self) -> Event {
        Event { space: self.space, bits: self.bits.complement() }
    }

    pub fn minus(&self, other: &Event) -> Result<Event, CcError> {
        self.check_same_space(other)?;
        Ok(Event { space: self.space, bits: self.bits.difference(&other.bits) })
    }

    pub fn symmetric_difference(&self, other: &Event) -> Result<Event, CcError> {
        self.check_same_space(other)?;
        Ok(Event { space: self.space, bits: self.bits.symmetric_difference(&other.bits) })
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool, CcError> {
        self.check_same_space(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }
}
