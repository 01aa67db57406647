//! Measure-preserving extension of a classical space so that a selected
//! correlated pair acquires a common cause of any requested admissible
//! type.
//!
//! One extension step doubles the space: each atom x splits into (x,1)
//! and (x,2), and the mass of x is divided between the copies by a
//! per-cell coefficient chosen so that the set of all copy-1 atoms is a
//! proper common cause of the embedded pair with exactly the requested
//! quintuple. Iterating the step handles any finite request list; causes
//! built earlier are pushed forward through the later embeddings and
//! remain common causes because the embeddings are measure-preserving
//! homomorphisms.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::CcError;
use crate::event_algebra::{AtomicSpace, Event, SpaceId};
use crate::rational::Rat;
use crate::reichenbach::{
    check_common_cause, is_admissible, measured_type, CcType, CcVerdict,
};

/// A Boolean algebra embedding of one atomic space into another,
/// represented by the image of every source atom. Compositions are
/// flattened eagerly so mapping an event is a single union.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: SpaceId,
    target: SpaceId,
    atom_image: Vec<Event>,
}

impl Embedding {
    pub fn identity(space: &AtomicSpace) -> Self {
        Embedding {
            source: space.id(),
            target: space.id(),
            atom_image: (0..space.atom_count())
                .map(|i| space.event_from_indices([i]).unwrap())
                .collect(),
        }
    }

    pub fn source_id(&self) -> SpaceId {
        self.source
    }

    pub fn target_id(&self) -> SpaceId {
        self.target
    }

    pub fn atom_image(&self) -> &[Event] {
        &self.atom_image
    }

    /// Image of a source event: the union of its atoms' images.
    pub fn map_event(&self, e: &Event) -> Result<Event, CcError> {
        if e.space_id() != self.source {
            return Err(CcError::ForeignEvent);
        }
        let universe = self.atom_image[0].bits().universe_len();
        let mut bits = BitSet::empty(universe);
        for i in e.bits().iter() {
            bits = bits.union(self.atom_image[i].bits());
        }
        Ok(Event::from_parts(self.target, bits))
    }

    /// `self` followed by `later`.
    pub fn compose(&self, later: &Embedding) -> Result<Embedding, CcError> {
        if self.target != later.source {
            return Err(CcError::ForeignEvent);
        }
        let atom_image = self
            .atom_image
            .iter()
            .map(|img| later.map_event(img))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Embedding { source: self.source, target: later.target, atom_image })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonCauseEntry {
    pub pair_index: usize,
    /// The constructed cause, as an event of the extended space.
    pub event: Event,
    pub requested: CcType,
    pub measured: CcType,
    pub verdict: CcVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationMode {
    Exhaustive,
    SpotCheck { samples: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct VerificationOutcome {
    pub ok: bool,
    pub mode: VerificationMode,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CompletionReport {
    pub extended_space: AtomicSpace,
    pub embedding: Embedding,
    pub common_causes: Vec<CommonCauseEntry>,
    pub extension_check: VerificationOutcome,
}

#[derive(Debug, Clone, Copy)]
pub struct CompleteOptions {
    /// Above this atom count, event enumeration switches to sampling.
    pub enum_limit: usize,
    /// Above this atom count, homomorphism pair checks switch to sampling.
    pub pair_limit: usize,
    /// Hard cap on the atom count of a constructed extension.
    pub max_atoms: usize,
    /// Sample count for spot-check verification.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CompleteOptions {
    fn default() -> Self {
        CompleteOptions {
            enum_limit: crate::event_algebra::DEFAULT_ENUM_LIMIT,
            pair_limit: 8,
            max_atoms: 1 << 14,
            samples: 1024,
            seed: 0,
        }
    }
}

/// The four joint cells of a pair, in the fixed order used for weights.
fn cell_index(in_a: bool, in_b: bool) -> usize {
    match (in_a, in_b) {
        (true, true) => 0,   // A ∧ B
        (true, false) => 1,  // A ∧ B⊥
        (false, true) => 2,  // A⊥ ∧ B
        (false, false) => 3, // A⊥ ∧ B⊥
    }
}

/// Per-cell copy-1 weight coefficients. Each equals the target mass
/// r_C · (conditional cell probability given C) divided by the current
/// cell mass; a cell of measure zero keeps coefficient zero (its target
/// mass is forced to zero by admissibility).
fn cell_coefficients(ct: &CcType, cell_mass: &[Rat; 4]) -> Result<[Rat; 4], CcError> {
    let t = &ct.r_a_given_c;
    let s = &ct.r_b_given_c;
    let one = Rat::one();
    let rho = [
        &ct.r_c * t * s,
        &ct.r_c * t * (&one - s),
        &ct.r_c * (&one - t) * s,
        &ct.r_c * (&one - t) * (&one - s),
    ];
    let mut out = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
    for i in 0..4 {
        if cell_mass[i].is_zero() {
            if !rho[i].is_zero() {
                return Err(CcError::NotAdmissible {
                    reason: format!("cell {i} has measure 0 but the type puts mass on it"),
                });
            }
            continue;
        }
        let coeff = &rho[i] / &cell_mass[i];
        assert!(
            !coeff.is_negative() && coeff <= one,
            "admissible type produced coefficient {coeff} outside [0,1]"
        );
        out[i] = coeff;
    }
    Ok(out)
}

struct Extension {
    space: AtomicSpace,
    embedding: Embedding,
    cause: Event,
}

fn extend_once_core(
    space: &AtomicSpace,
    a: &Event,
    b: &Event,
    ct: &CcType,
) -> Result<Extension, CcError> {
    let mu_a = space.measure(a)?;
    let mu_b = space.measure(b)?;
    let ab = a.meet(b)?;
    let mu_ab = space.measure(&ab)?;
    if mu_ab <= &mu_a * &mu_b {
        return Err(CcError::NotCorrelated);
    }
    if !is_admissible(ct, &mu_a, &mu_b, &mu_ab) {
        return Err(CcError::NotAdmissible {
            reason: format!("type {ct} for marginals ({mu_a}, {mu_b}, {mu_ab})"),
        });
    }

    let n = space.atom_count();
    let cell_of: Vec<usize> = (0..n)
        .map(|i| cell_index(a.bits().contains(i), b.bits().contains(i)))
        .collect();
    let mut cell_mass = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
    for i in 0..n {
        cell_mass[cell_of[i]] += space.atom_weight(i);
    }
    let coeff = cell_coefficients(ct, &cell_mass)?;

    let mut atoms = Vec::with_capacity(2 * n);
    for i in 0..n {
        atoms.push((format!("{}:1", space.atom_name(i)), &coeff[cell_of[i]] * space.atom_weight(i)));
    }
    for i in 0..n {
        atoms.push((
            format!("{}:2", space.atom_name(i)),
            (Rat::one() - &coeff[cell_of[i]]) * space.atom_weight(i),
        ));
    }
    let extended = AtomicSpace::new(atoms)?;

    let atom_image = (0..n)
        .map(|i| extended.event_from_indices([i, n + i]).unwrap())
        .collect();
    let embedding =
        Embedding { source: space.id(), target: extended.id(), atom_image };
    let cause = extended.event_from_indices(0..n).unwrap();
    Ok(Extension { space: extended, embedding, cause })
}

/// One doubling step: extends `space` so that the correlated pair
/// `(a, b)` has a proper common cause of type `ct`, and verifies both the
/// extension and the cause on the result.
pub fn extend_once(
    space: &AtomicSpace,
    a: &Event,
    b: &Event,
    ct: &CcType,
) -> Result<CompletionReport, CcError> {
    complete(space, &[(a.clone(), b.clone(), ct.clone())], &CompleteOptions::default())
}

/// Folds [`extend_once`] over a finite request list. Causes constructed
/// in earlier steps are pushed forward through later embeddings, and each
/// is re-verified in the final space rather than trusted.
pub fn complete(
    space: &AtomicSpace,
    requests: &[(Event, Event, CcType)],
    opts: &CompleteOptions,
) -> Result<CompletionReport, CcError> {
    let final_atoms = space
        .atom_count()
        .checked_shl(requests.len() as u32)
        .unwrap_or(usize::MAX);
    if final_atoms > opts.max_atoms {
        return Err(CcError::RequestLimit { atoms: final_atoms, limit: opts.max_atoms });
    }

    let mut current = space.clone();
    let mut total = Embedding::identity(space);
    let mut causes: Vec<Event> = Vec::new();

    for (a, b, ct) in requests {
        let a_cur = total.map_event(a)?;
        let b_cur = total.map_event(b)?;
        let step = extend_once_core(&current, &a_cur, &b_cur, ct)?;
        for cause in &mut causes {
            *cause = step.embedding.map_event(cause)?;
        }
        causes.push(step.cause);
        total = total.compose(&step.embedding)?;
        current = step.space;
    }

    let mut entries = Vec::with_capacity(requests.len());
    for (i, (a, b, ct)) in requests.iter().enumerate() {
        let ha = total.map_event(a)?;
        let hb = total.map_event(b)?;
        let verdict = check_common_cause(&current, &ha, &hb, &causes[i])?;
        let measured = measured_type(&current, &ha, &hb, &causes[i])?;
        entries.push(CommonCauseEntry {
            pair_index: i,
            event: causes[i].clone(),
            requested: ct.clone(),
            measured,
            verdict,
        });
    }

    let extension_check = verify_extension(space, &current, &total, opts);
    Ok(CompletionReport {
        extended_space: current,
        embedding: total,
        common_causes: entries,
        extension_check,
    })
}

fn random_event(space: &AtomicSpace, rng: &mut ChaCha8Rng) -> Event {
    let n = space.atom_count();
    let indices = (0..n).filter(|_| rng.random::<bool>());
    space.event_from_indices(indices).unwrap()
}

/// Checks that `emb` is a measure-preserving Boolean algebra embedding of
/// `source` into `target`: atom images partition the target, the induced
/// map is injective and preserves meet, join and complement, and
/// μ′∘h = μ. Exhaustive within the option limits, sampled above them.
/// Structural failures are reported as diagnostics, never as panics.
pub fn verify_extension(
    source: &AtomicSpace,
    target: &AtomicSpace,
    emb: &Embedding,
    opts: &CompleteOptions,
) -> VerificationOutcome {
    let mut diagnostics = Vec::new();
    let n = source.atom_count();

    if emb.source_id() != source.id() || emb.target_id() != target.id() {
        diagnostics.push("embedding does not connect these spaces".into());
    }
    if emb.atom_image().len() != n {
        diagnostics.push("atom image count differs from source atom count".into());
    }
    if !diagnostics.is_empty() {
        return VerificationOutcome {
            ok: false,
            mode: VerificationMode::Exhaustive,
            diagnostics,
        };
    }

    let mut seen = BitSet::empty(target.atom_count());
    for (i, img) in emb.atom_image().iter().enumerate() {
        if img.is_empty() {
            diagnostics.push(format!("image of atom {:?} is empty", source.atom_name(i)));
        }
        if !seen.is_disjoint(img.bits()) {
            diagnostics.push(format!("image of atom {:?} overlaps another image", source.atom_name(i)));
        }
        seen = seen.union(img.bits());
    }
    if !seen.is_full() {
        diagnostics.push("atom images do not cover the target".into());
    }

    let exhaustive_events = n <= opts.enum_limit;
    let exhaustive_pairs = n <= opts.pair_limit;
    let mode = if exhaustive_events && exhaustive_pairs {
        VerificationMode::Exhaustive
    } else {
        VerificationMode::SpotCheck { samples: opts.samples, seed: opts.seed }
    };

    let events: Vec<Event> = if exhaustive_events {
        match source.all_events(opts.enum_limit) {
            Ok(iter) => iter.collect(),
            Err(_) => unreachable!("exhaustive_events checked the limit"),
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut out = vec![source.empty_event(), source.full_event()];
        out.extend((0..opts.samples).map(|_| random_event(source, &mut rng)));
        out
    };

    for x in &events {
        let hx = emb.map_event(x).expect("source event maps");
        match (source.measure(x), target.measure(&hx)) {
            (Ok(mx), Ok(mhx)) => {
                if mx != mhx {
                    diagnostics.push(format!("measure not preserved on {:?}", x.bits()));
                }
            }
            _ => diagnostics.push("measure evaluation failed".into()),
        }
        if emb.map_event(&x.complement()).expect("complement maps") != hx.complement() {
            diagnostics.push(format!("complement not preserved on {:?}", x.bits()));
        }
    }

    let pairs: Vec<(Event, Event)> = if exhaustive_pairs {
        let evs = events.clone();
        evs.iter()
            .flat_map(|x| events.iter().map(move |y| (x.clone(), y.clone())))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
        (0..opts.samples)
            .map(|_| (random_event(source, &mut rng), random_event(source, &mut rng)))
            .collect()
    };
    for (x, y) in &pairs {
        let hx = emb.map_event(x).expect("maps");
        let hy = emb.map_event(y).expect("maps");
        if emb.map_event(&x.meet(y).unwrap()).expect("maps") != hx.meet(&hy).unwrap() {
            diagnostics.push(format!("meet not preserved on {:?}, {:?}", x.bits(), y.bits()));
        }
        if emb.map_event(&x.join(y).unwrap()).expect("maps") != hx.join(&hy).unwrap() {
            diagnostics.push(format!("join not preserved on {:?}, {:?}", x.bits(), y.bits()));
        }
        if (x == y) != (hx == hy) {
            diagnostics.push(format!("injectivity violated on {:?}, {:?}", x.bits(), y.bits()));
        }
    }

    VerificationOutcome { ok: diagnostics.is_empty(), mode, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_algebra::DEFAULT_ENUM_LIMIT;
    use crate::rational::rat;
    use crate::reichenbach::{type_from_params, CcClass};

    fn correlated_four_atom() -> (AtomicSpace, Event, Event) {
        let s = AtomicSpace::new(vec![
            ("ab".into(), rat(3, 10)),
            ("ab'".into(), rat(1, 5)),
            ("a'b".into(), rat(1, 5)),
            ("a'b'".into(), rat(3, 10)),
        ])
        .unwrap();
        let a = s.event_from_indices([0, 1]).unwrap();
        let b = s.event_from_indices([0, 2]).unwrap();
        (s, a, b)
    }

    fn unit_type() -> CcType {
        CcType::new(rat(1, 6), rat(1, 1), rat(1, 1), rat(2, 5), rat(2, 5))
    }

    #[test]
    fn doubling_example_weights_and_cause() {
        let (s, a, b) = correlated_four_atom();
        let report = extend_once(&s, &a, &b, &unit_type()).unwrap();
        let ext = &report.extended_space;
        assert_eq!(ext.atom_count(), 8);

        // copy-1 weights: only the A∧B cell keeps mass, at ratio 5/9
        assert_eq!(*ext.atom_weight(0), rat(5, 9) * rat(3, 10));
        assert_eq!(*ext.atom_weight(1), rat(0, 1));
        assert_eq!(*ext.atom_weight(2), rat(0, 1));
        assert_eq!(*ext.atom_weight(3), rat(0, 1));

        let entry = &report.common_causes[0];
        assert_eq!(ext.measure(&entry.event).unwrap(), rat(1, 6));
        assert_eq!(entry.measured, unit_type());
        assert!(entry.verdict.is_common_cause);
        assert!(entry.verdict.classification.contains(&CcClass::Proper));
        assert!(report.extension_check.ok);
    }

    #[test]
    fn measure_is_preserved_on_every_event() {
        let (s, a, b) = correlated_four_atom();
        let ct = type_from_params(&rat(1, 2), &rat(1, 2), &rat(3, 10), &rat(4, 5), &rat(7, 10))
            .unwrap();
        let report = extend_once(&s, &a, &b, &ct).unwrap();
        for x in s.all_events(DEFAULT_ENUM_LIMIT).unwrap() {
            let hx = report.embedding.map_event(&x).unwrap();
            assert_eq!(s.measure(&x).unwrap(), report.extended_space.measure(&hx).unwrap());
        }
    }

    #[test]
    fn constructed_cause_has_exactly_the_requested_type() {
        let (s, a, b) = correlated_four_atom();
        let ct = type_from_params(&rat(1, 2), &rat(1, 2), &rat(3, 10), &rat(3, 4), &rat(9, 10))
            .unwrap();
        let report = extend_once(&s, &a, &b, &ct).unwrap();
        let entry = &report.common_causes[0];
        assert_eq!(entry.measured, ct);
        assert!(entry.verdict.is_proper());
    }

    #[test]
    fn rejects_inadmissible_and_uncorrelated_requests() {
        let (s, a, b) = correlated_four_atom();
        let bad = CcType::new(rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 4));
        assert!(matches!(
            extend_once(&s, &a, &b, &bad).unwrap_err(),
            CcError::NotAdmissible { .. }
        ));

        let indep = s.event_from_indices([0, 3]).unwrap();
        assert!(matches!(
            extend_once(&s, &a, &indep, &unit_type()).unwrap_err(),
            CcError::NotCorrelated
        ));
    }

    #[test]
    fn empty_request_list_is_the_identity() {
        let (s, _, _) = correlated_four_atom();
        let report = complete(&s, &[], &CompleteOptions::default()).unwrap();
        assert_eq!(report.extended_space.atom_count(), 4);
        assert!(report.common_causes.is_empty());
        assert!(report.extension_check.ok);
        let e = s.event_from_indices([1, 2]).unwrap();
        assert_eq!(report.embedding.map_event(&e).unwrap(), e);
    }

    #[test]
    fn two_overlapping_requests_yield_two_verified_causes() {
        let (s, a, b) = correlated_four_atom();
        let ct1 = type_from_params(&rat(1, 2), &rat(1, 2), &rat(3, 10), &rat(1, 1), &rat(1, 1))
            .unwrap();
        // second pair shares event a: (a, a∧b) is correlated, and the
        // second event containing the joint forces t = 1
        let ab = a.meet(&b).unwrap();
        let mu_a = s.measure(&a).unwrap();
        let mu_ab = s.measure(&ab).unwrap();
        let ct2 = type_from_params(&mu_a, &mu_ab, &mu_ab, &rat(1, 1), &rat(7, 10)).unwrap();
        let report = complete(
            &s,
            &[(a.clone(), b.clone(), ct1.clone()), (a.clone(), ab.clone(), ct2.clone())],
            &CompleteOptions::default(),
        )
        .unwrap();
        assert_eq!(report.extended_space.atom_count(), 16);
        assert_eq!(report.common_causes.len(), 2);
        for entry in &report.common_causes {
            assert!(entry.verdict.is_common_cause);
            assert!(entry.verdict.is_proper());
            assert_eq!(entry.measured, entry.requested);
        }
        assert!(report.extension_check.ok);
    }

    #[test]
    fn request_limit_guards_blowup() {
        let (s, a, b) = correlated_four_atom();
        let ct = unit_type();
        let reqs: Vec<_> = (0..13).map(|_| (a.clone(), b.clone(), ct.clone())).collect();
        assert!(matches!(
            complete(&s, &reqs, &CompleteOptions::default()).unwrap_err(),
            CcError::RequestLimit { .. }
        ));
    }

    #[test]
    fn identity_embedding_verifies() {
        let (s, _, _) = correlated_four_atom();
        let outcome =
            verify_extension(&s, &s, &Embedding::identity(&s), &CompleteOptions::default());
        assert!(outcome.ok, "{:?}", outcome.diagnostics);
    }

    #[test]
    fn perturbed_weights_are_detected() {
        let (s, a, b) = correlated_four_atom();
        let report = extend_once(&s, &a, &b, &unit_type()).unwrap();
        // rebuild the target with weights swapped across two different
        // atom images: totals stay 1 but the measure map breaks
        let ext = &report.extended_space;
        let mut atoms: Vec<(String, Rat)> = (0..ext.atom_count())
            .map(|i| (ext.atom_name(i).to_string(), ext.atom_weight(i).clone()))
            .collect();
        let w0 = atoms[0].1.clone();
        atoms[0].1 = atoms[5].1.clone();
        atoms[5].1 = w0;
        let tampered = AtomicSpace::new(atoms).unwrap();
        let emb = Embedding {
            source: s.id(),
            target: tampered.id(),
            atom_image: (0..4).map(|i| tampered.event_from_indices([i, 4 + i]).unwrap()).collect(),
        };
        let outcome = verify_extension(&s, &tampered, &emb, &CompleteOptions::default());
        assert!(!outcome.ok);
        assert!(outcome.diagnostics.iter().any(|d| d.contains("measure not preserved")));
    }

    #[test]
    fn transported_correlation_is_exact() {
        let (s, a, b) = correlated_four_atom();
        let report = extend_once(&s, &a, &b, &unit_type()).unwrap();
        let ha = report.embedding.map_event(&a).unwrap();
        let hb = report.embedding.map_event(&b).unwrap();
        assert_eq!(
            s.correlation(&a, &b).unwrap(),
            report.extended_space.correlation(&ha, &hb).unwrap()
        );
    }
}
