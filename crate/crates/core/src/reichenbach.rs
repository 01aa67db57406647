//! The four common-cause conditions, cause classification, and the
//! two-parameter family of admissible cause types.
//!
//! For a positively correlated pair (A, B), an event C qualifies as a
//! common cause when it screens off the correlation both ways
//! (conditional independence given C and given C⊥) and is statistically
//! relevant to both A and B. All checks here are exact rational
//! identities; cross-multiplied forms avoid divisions entirely.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CcError;
use crate::event_algebra::{AtomicSpace, Event};
use crate::rational::{is_probability, Rat};

/// A candidate cause's probabilistic fingerprint: the quintuple
/// (r_C, r_{A|C}, r_{B|C}, r_{A|C⊥}, r_{B|C⊥}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcType {
    pub r_c: Rat,
    pub r_a_given_c: Rat,
    pub r_b_given_c: Rat,
    pub r_a_given_cperp: Rat,
    pub r_b_given_cperp: Rat,
}

impl CcType {
    pub fn new(
        r_c: Rat,
        r_a_given_c: Rat,
        r_b_given_c: Rat,
        r_a_given_cperp: Rat,
        r_b_given_cperp: Rat,
    ) -> Self {
        CcType { r_c, r_a_given_c, r_b_given_c, r_a_given_cperp, r_b_given_cperp }
    }

    /// Range and strictness constraints that do not involve the marginals:
    /// all five values are probabilities, r_C is strictly between 0 and 1,
    /// and conditioning on C must raise the probability of both events.
    pub fn validate(&self) -> Result<(), CcError> {
        for (label, v) in [
            ("r_c", &self.r_c),
            ("r_a_given_c", &self.r_a_given_c),
            ("r_b_given_c", &self.r_b_given_c),
            ("r_a_given_cperp", &self.r_a_given_cperp),
            ("r_b_given_cperp", &self.r_b_given_cperp),
        ] {
            if !is_probability(v) {
                return Err(CcError::NotAdmissible { reason: format!("{label} outside [0,1]") });
            }
        }
        if self.r_c.is_zero() || self.r_c.is_one() {
            return Err(CcError::NotAdmissible { reason: "r_c not strictly inside (0,1)".into() });
        }
        if self.r_a_given_c <= self.r_a_given_cperp {
            return Err(CcError::NotAdmissible { reason: "r_a_given_c <= r_a_given_cperp".into() });
        }
        if self.r_b_given_c <= self.r_b_given_cperp {
            return Err(CcError::NotAdmissible { reason: "r_b_given_c <= r_b_given_cperp".into() });
        }
        Ok(())
    }
}

impl fmt::Display for CcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {})",
            self.r_c, self.r_a_given_c, self.r_b_given_c, self.r_a_given_cperp, self.r_b_given_cperp
        )
    }
}

/// One of the four defining conditions, used to report failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CcCondition {
    ScreenOffC,
    ScreenOffCperp,
    RelevanceA,
    RelevanceB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CcClass {
    /// Not identical to A or B up to a probability-zero event.
    Proper,
    /// C implies both A and B (C ⊆ A∧B).
    Strong,
    /// C implies neither A nor B.
    GenuinelyProbabilistic,
    /// Conditional probabilities are 1 given C and 0 given C⊥.
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcVerdict {
    pub is_common_cause: bool,
    #[serde(rename = "failed")]
    pub failed_conditions: Vec<CcCondition>,
    pub classification: Vec<CcClass>,
}

impl CcVerdict {
    fn failed(failed_conditions: Vec<CcCondition>) -> Self {
        debug_assert!(!failed_conditions.is_empty());
        CcVerdict { is_common_cause: false, failed_conditions, classification: Vec::new() }
    }

    pub fn is_proper(&self) -> bool {
        self.classification.contains(&CcClass::Proper)
    }
}

/// Raw ingredients of a verdict: the seven cell measures that determine
/// all four conditions, plus the lattice relations driving classification.
struct CandidateData {
    mu_a: Rat,
    mu_b: Rat,
    mu_c: Rat,
    mu_ab: Rat,
    mu_ac: Rat,
    mu_bc: Rat,
    mu_abc: Rat,
    c_eq_a: bool,
    c_eq_b: bool,
    c_sub_a: bool,
    a_sub_c: bool,
    c_sub_b: bool,
    b_sub_c: bool,
    c_sub_ab: bool,
}

impl CandidateData {
    fn verdict(&self) -> CcVerdict {
        let one = Rat::one;
        let mu_cp = one() - &self.mu_c;
        let mu_acp = &self.mu_a - &self.mu_ac;
        let mu_bcp = &self.mu_b - &self.mu_bc;
        let mu_abcp = &self.mu_ab - &self.mu_abc;

        let mut failed = Vec::new();
        // screening off, cross-multiplied by mu_c^2 resp. mu_cp^2
        if &self.mu_abc * &self.mu_c != &self.mu_ac * &self.mu_bc {
            failed.push(CcCondition::ScreenOffC);
        }
        if &mu_abcp * &mu_cp != &mu_acp * &mu_bcp {
            failed.push(CcCondition::ScreenOffCperp);
        }
        if &self.mu_ac * &mu_cp <= &mu_acp * &self.mu_c {
            failed.push(CcCondition::RelevanceA);
        }
        if &self.mu_bc * &mu_cp <= &mu_bcp * &self.mu_c {
            failed.push(CcCondition::RelevanceB);
        }
        if !failed.is_empty() {
            return CcVerdict::failed(failed);
        }

        let mut classification = Vec::new();
        let improper_wrt_a =
            self.c_eq_a || ((self.c_sub_a || self.a_sub_c) && self.mu_c == self.mu_a);
        let improper_wrt_b =
            self.c_eq_b || ((self.c_sub_b || self.b_sub_c) && self.mu_c == self.mu_b);
        if !improper_wrt_a && !improper_wrt_b {
            classification.push(CcClass::Proper);
        }
        if self.c_sub_ab {
            classification.push(CcClass::Strong);
        }
        if !(self.c_sub_a || self.c_eq_a) && !(self.c_sub_b || self.c_eq_b) {
            classification.push(CcClass::GenuinelyProbabilistic);
        }
        if self.mu_ac == self.mu_c
            && self.mu_bc == self.mu_c
            && mu_acp.is_zero()
            && mu_bcp.is_zero()
        {
            classification.push(CcClass::Deterministic);
        }
        CcVerdict { is_common_cause: true, failed_conditions: Vec::new(), classification }
    }
}

/// Evaluates the four conditions for candidate `c` against the correlated
/// pair `(a, b)` and classifies the outcome.
///
/// All of μ(a), μ(b), μ(c), μ(c⊥) must be positive.
pub fn check_common_cause(
    space: &AtomicSpace,
    a: &Event,
    b: &Event,
    c: &Event,
) -> Result<CcVerdict, CcError> {
    let mu_a = space.measure(a)?;
    let mu_b = space.measure(b)?;
    let mu_c = space.measure(c)?;
    let cp = c.complement();
    let mu_cp = space.measure(&cp)?;
    for (label, value) in [("A", &mu_a), ("B", &mu_b), ("C", &mu_c), ("C⊥", &mu_cp)] {
        if value.is_zero() {
            return Err(CcError::ZeroProbabilityCondition { which: label.into() });
        }
    }

    let ab = a.meet(b)?;
    let data = CandidateData {
        mu_ab: space.measure(&ab)?,
        mu_ac: space.measure(&a.meet(c)?)?,
        mu_bc: space.measure(&b.meet(c)?)?,
        mu_abc: space.measure(&ab.meet(c)?)?,
        c_eq_a: c == a,
        c_eq_b: c == b,
        c_sub_a: c.is_subset(a)? && c != a,
        a_sub_c: a.is_subset(c)? && c != a,
        c_sub_b: c.is_subset(b)? && c != b,
        b_sub_c: b.is_subset(c)? && c != b,
        c_sub_ab: c.is_subset(&ab)?,
        mu_a,
        mu_b,
        mu_c,
    };
    Ok(data.verdict())
}

/// Lower bounds (t_min, s_min) of the free parameters t = r_{A|C} and
/// s = r_{B|C}; the admissible region is [t_min, 1] × [s_min, 1].
pub fn parameter_bounds(mu_a: &Rat, mu_b: &Rat, mu_ab: &Rat) -> Result<(Rat, Rat), CcError> {
    if mu_ab <= &(mu_a * mu_b) {
        return Err(CcError::NotCorrelated);
    }
    if mu_ab > mu_a.min(mu_b) {
        return Err(CcError::InconsistentJoint);
    }
    // The two checks above force both marginals strictly inside (0, 1),
    // so the divisions are safe.
    Ok((mu_ab / mu_b, mu_ab / mu_a))
}

/// Derives the full admissible quintuple from the free parameters (t, s).
pub fn type_from_params(
    mu_a: &Rat,
    mu_b: &Rat,
    mu_ab: &Rat,
    t: &Rat,
    s: &Rat,
) -> Result<CcType, CcError> {
    let (t_min, s_min) = parameter_bounds(mu_a, mu_b, mu_ab)?;
    if t == mu_a {
        return Err(CcError::DegenerateParams { which: "t = mu_a".into() });
    }
    if s == mu_b {
        return Err(CcError::DegenerateParams { which: "s = mu_b".into() });
    }
    if t < &t_min || t > &Rat::one() {
        return Err(CcError::OutOfBounds { which: "t".into() });
    }
    if s < &s_min || s > &Rat::one() {
        return Err(CcError::OutOfBounds { which: "s".into() });
    }

    let corr = mu_ab - mu_a * mu_b;
    let r_c = &corr / ((mu_a - t) * (mu_b - s) + &corr);
    let r_a_given_cperp = (mu_ab - mu_a * s) / (mu_b - s);
    let r_b_given_cperp = (mu_ab - mu_b * t) / (mu_a - t);
    Ok(CcType::new(r_c, t.clone(), s.clone(), r_a_given_cperp, r_b_given_cperp))
}

/// Whether the quintuple is admissible for the correlation
/// (μ(A), μ(B), μ(A∧B)): range and strictness constraints plus the three
/// total-probability identities, all as exact equalities.
pub fn is_admissible(ct: &CcType, mu_a: &Rat, mu_b: &Rat, mu_ab: &Rat) -> bool {
    if ct.validate().is_err() {
        return false;
    }
    let r_cperp = Rat::one() - &ct.r_c;
    let a_ok = *mu_a == &ct.r_a_given_c * &ct.r_c + &ct.r_a_given_cperp * &r_cperp;
    let b_ok = *mu_b == &ct.r_b_given_c * &ct.r_c + &ct.r_b_given_cperp * &r_cperp;
    let ab_ok = *mu_ab
        == &ct.r_a_given_c * &ct.r_b_given_c * &ct.r_c
            + &ct.r_a_given_cperp * &ct.r_b_given_cperp * &r_cperp;
    a_ok && b_ok && ab_ok
}

/// The quintuple (t1)–(t5) actually measured for `c` against `(a, b)`.
pub fn measured_type(
    space: &AtomicSpace,
    a: &Event,
    b: &Event,
    c: &Event,
) -> Result<CcType, CcError> {
    let cp = c.complement();
    Ok(CcType::new(
        space.measure(c)?,
        space.conditional(a, c)?,
        space.conditional(b, c)?,
        space.conditional(a, &cp)?,
        space.conditional(b, &cp)?,
    ))
}

use crate::event_algebra::IntMeasures;

/// Allocation-light short-circuit over the four conditions, for rejecting
/// the bulk of enumeration candidates before building a full verdict.
/// Mirrors the cross-multiplied forms in [`CandidateData::verdict`] over
/// the common-denominator table (every condition scales by the same
/// positive power of the denominator); the survey tests pin the two
/// routes against each other.
fn passes_conditions_quick(m: &IntMeasures, ma: u64, mb: u64, mc: u64) -> bool {
    match m {
        IntMeasures::Small { num, den } => {
            let w = |mask: u64| num[mask as usize] as u128;
            let (n_a, n_b, n_c) = (w(ma), w(mb), w(mc));
            if n_a == 0 || n_b == 0 || n_c == 0 || n_c == *den as u128 {
                return false;
            }
            let n_cp = *den as u128 - n_c;
            let (n_ac, n_bc, n_abc) = (w(ma & mc), w(mb & mc), w(ma & mb & mc));
            if n_abc * n_c != n_ac * n_bc {
                return false;
            }
            let n_acp = n_a - n_ac;
            if n_ac * n_cp <= n_acp * n_c {
                return false;
            }
            let n_bcp = n_b - n_bc;
            if n_bc * n_cp <= n_bcp * n_c {
                return false;
            }
            let n_abcp = w(ma & mb) - n_abc;
            n_abcp * n_cp == n_acp * n_bcp
        }
        IntMeasures::Big { num, den } => {
            let n_a = &num[ma as usize];
            let n_b = &num[mb as usize];
            let n_c = &num[mc as usize];
            if n_a.is_zero() || n_b.is_zero() || n_c.is_zero() || n_c == den {
                return false;
            }
            let n_cp = den - n_c;
            let n_ac = &num[(ma & mc) as usize];
            let n_bc = &num[(mb & mc) as usize];
            let n_abc = &num[(ma & mb & mc) as usize];
            if n_abc * n_c != n_ac * n_bc {
                return false;
            }
            let n_acp = n_a - n_ac;
            if n_ac * &n_cp <= &n_acp * n_c {
                return false;
            }
            let n_bcp = n_b - n_bc;
            if n_bc * &n_cp <= &n_bcp * n_c {
                return false;
            }
            let n_abcp = &num[(ma & mb) as usize] - n_abc;
            n_abcp * &n_cp == n_acp * n_bcp
        }
    }
}

/// Table-driven verdict for enumeration sweeps: all measures come from a
/// precomputed per-mask table, masks fit in a word. Returns None when the
/// zero-probability preconditions fail. Shares the condition evaluator
/// with [`check_common_cause`].
fn verdict_from_table(measures: &[Rat], ma: u64, mb: u64, mc: u64) -> Option<CcVerdict> {
    let full = (measures.len() - 1) as u64;
    let mu_a = &measures[ma as usize];
    let mu_b = &measures[mb as usize];
    let mu_c = &measures[mc as usize];
    let mu_cp = &measures[(!mc & full) as usize];
    if mu_a.is_zero() || mu_b.is_zero() || mu_c.is_zero() || mu_cp.is_zero() {
        return None;
    }
    let data = CandidateData {
        mu_a: mu_a.clone(),
        mu_b: mu_b.clone(),
        mu_c: mu_c.clone(),
        mu_ab: measures[(ma & mb) as usize].clone(),
        mu_ac: measures[(ma & mc) as usize].clone(),
        mu_bc: measures[(mb & mc) as usize].clone(),
        mu_abc: measures[(ma & mb & mc) as usize].clone(),
        c_eq_a: mc == ma,
        c_eq_b: mc == mb,
        c_sub_a: mc & !ma == 0 && mc != ma,
        a_sub_c: ma & !mc == 0 && mc != ma,
        c_sub_b: mc & !mb == 0 && mc != mb,
        b_sub_c: mb & !mc == 0 && mc != mb,
        c_sub_ab: mc & !(ma & mb) == 0,
    };
    Some(data.verdict())
}

/// Every event of the space that passes [`check_common_cause`] for the
/// pair, in ascending bitmask order. An empty result (after filtering to
/// proper causes) means the space is common cause incomplete for `(a, b)`.
pub fn find_common_causes(
    space: &AtomicSpace,
    a: &Event,
    b: &Event,
    limit: usize,
) -> Result<Vec<(Event, CcVerdict)>, CcError> {
    if !space.is_correlated(a, b)? {
        return Err(CcError::NotCorrelated);
    }
    space.check_enum_limit(limit)?;
    let n = space.atom_count();
    let measures = space.all_measures();
    let ints = space.integer_measures();
    let ma = mask_of(a);
    let mb = mask_of(b);
    let nested: Vec<Option<(Event, CcVerdict)>> = (0u64..(1u64 << n))
        .into_par_iter()
        .map(|mc| {
            if !passes_conditions_quick(&ints, ma, mb, mc) {
                return None;
            }
            match verdict_from_table(&measures, ma, mb, mc) {
                Some(v) if v.is_common_cause => Some((space.event_from_mask(mc), v)),
                _ => None,
            }
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

fn mask_of(e: &Event) -> u64 {
    e.bits().iter().fold(0u64, |acc, i| acc | 1 << i)
}

/// One pair's enumeration result inside a survey.
#[derive(Debug, Clone)]
pub struct PairSurvey {
    pub a: Event,
    pub b: Event,
    pub correlation: Rat,
    pub causes: Vec<(Event, CcVerdict)>,
    pub has_proper: bool,
}

/// Full sweep: every correlated pair with every common cause the space
/// already contains. One shared measure table backs all checks.
pub fn survey_common_causes(
    space: &AtomicSpace,
    limit: usize,
) -> Result<Vec<PairSurvey>, CcError> {
    let pairs = space.list_correlated_pairs(limit)?;
    let measures = space.all_measures();
    let ints = space.integer_measures();
    let n = space.atom_count();
    Ok(pairs
        .into_par_iter()
        .map(|(a, b)| {
            let ma = mask_of(&a);
            let mb = mask_of(&b);
            let correlation =
                &measures[(ma & mb) as usize] - &measures[ma as usize] * &measures[mb as usize];
            let causes: Vec<(Event, CcVerdict)> = (0u64..(1u64 << n))
                .filter(|&mc| passes_conditions_quick(&ints, ma, mb, mc))
                .filter_map(|mc| match verdict_from_table(&measures, ma, mb, mc) {
                    Some(v) if v.is_common_cause => Some((space.event_from_mask(mc), v)),
                    _ => None,
                })
                .collect();
            let has_proper = causes.iter().any(|(_, v)| v.is_proper());
            PairSurvey { a, b, correlation, causes, has_proper }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcClosedReport {
    pub closed: bool,
    pub incomplete_pairs: Vec<(Event, Event)>,
}

/// A space is common cause closed when every correlated pair has at least
/// one *proper* common cause inside the space itself.
pub fn common_cause_closed(space: &AtomicSpace, limit: usize) -> Result<CcClosedReport, CcError> {
    let pairs = space.list_correlated_pairs(limit)?;
    let measures = space.all_measures();
    let ints = space.integer_measures();
    let n = space.atom_count();
    let incomplete_pairs: Vec<(Event, Event)> = pairs
        .into_par_iter()
        .filter(|(a, b)| {
            let (ma, mb) = (mask_of(a), mask_of(b));
            let has_proper = (0u64..(1u64 << n)).any(|mc| {
                passes_conditions_quick(&ints, ma, mb, mc)
                    && matches!(
                        verdict_from_table(&measures, ma, mb, mc),
                        Some(v) if v.is_common_cause && v.is_proper()
                    )
            });
            !has_proper
        })
        .collect();
    Ok(CcClosedReport { closed: incomplete_pairs.is_empty(), incomplete_pairs })
}
