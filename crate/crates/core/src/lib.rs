//! Reichenbachian common causes in finite probability spaces.
//!
//! This crate works with two kinds of probability space:
//!
//! * **classical** — a finite set of named atoms with exact rational
//!   weights; events are subsets of atoms and all arithmetic is exact, so
//!   the screening-off conditions are decided as rational identities;
//! * **quantum** — a finite-dimensional Hilbert space with a density
//!   matrix state; events are projections and conditions are checked
//!   within explicit numerical tolerances.
//!
//! On top of either kind it provides:
//!
//! * detection of positively correlated event pairs,
//! * verification of the four Reichenbach conditions (screening off by a
//!   candidate cause and its complement, plus the two statistical
//!   relevance inequalities) together with a classification of the
//!   verified causes (proper, strong, genuinely probabilistic,
//!   deterministic),
//! * the two-parameter family of admissible cause types for a given
//!   correlation, and
//! * constructive *common cause completion*: extending a space so that a
//!   selected correlation acquires a common cause of any admissible type,
//!   by measure-preserving doubling in the classical case and by a
//!   weighted block-space embedding in the quantum case.
//!
//! A CHSH module rounds this out with the probability-form Bell
//! inequality, brute-force search for *common* common causes, and a
//! quantum configuration violating the classical bound.

pub mod bell_ccc;
pub mod bitset;
pub mod classical_completion;
pub mod error;
pub mod event_algebra;
pub mod io;
pub mod quantum_completion;
pub mod quantum_space;
pub mod rational;
pub mod reichenbach;
pub mod sampling;

pub use bitset::BitSet;
pub use error::CcError;
pub use event_algebra::{AtomicSpace, Event, SpaceId, DEFAULT_ENUM_LIMIT};
pub use quantum_space::{Projection, QuantumSpace, Tolerances};
pub use rational::Rat;
pub use reichenbach::{CcClass, CcCondition, CcType, CcVerdict};
