//! The probability-form CHSH combination, common *common* causes, and
//! the derivation connecting them.
//!
//! For four correlated pairs (A_i, B_j), a single event screening off
//! all of them forces |μ(A₁B₁)+μ(A₁B₂)+μ(A₂B₁)−μ(A₂B₂)| ≤ 2: condition
//! each joint on the shared cause, apply the elementary inequality
//! |a₁b₁+a₁b₂+a₂b₁−a₂b₂| ≤ 2 for numbers in [0,1] branchwise, and
//! recombine by total probability. The brute-force search here hunts for
//! such a shared cause; its absence is what blocks the derivation.

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CcError;
use crate::event_algebra::{AtomicSpace, Event};
use crate::quantum_space::{
    meet_commuting, state_value, C64, CMat, CVec, Projection, QuantumSpace, Tolerances,
};
use crate::rational::{rat, Rat};
use crate::reichenbach::{check_common_cause, CcVerdict};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshReport<T> {
    pub value: T,
    pub satisfied: bool,
    /// The four joint probabilities, ordered (A₁B₁, A₁B₂, A₂B₁, A₂B₂).
    pub terms: [T; 4],
}

/// Exact probability-form CHSH on a classical space.
pub fn chsh_classical(
    space: &AtomicSpace,
    a1: &Event,
    a2: &Event,
    b1: &Event,
    b2: &Event,
) -> Result<ChshReport<Rat>, CcError> {
    let joint = |x: &Event, y: &Event| space.measure(&x.meet(y)?);
    let terms = [joint(a1, b1)?, joint(a1, b2)?, joint(a2, b1)?, joint(a2, b2)?];
    let value = &terms[0] + &terms[1] + &terms[2] - &terms[3];
    let satisfied = value.abs() <= rat(2, 1);
    Ok(ChshReport { value, satisfied, terms })
}

/// Probability-form CHSH on a quantum space. Only cross-commutation is
/// required: each A_i must commute with each B_j, while A₁ and A₂ (and
/// B₁ and B₂) may fail to commute with each other.
pub fn chsh_quantum(
    qs: &QuantumSpace,
    a1: &Projection,
    a2: &Projection,
    b1: &Projection,
    b2: &Projection,
    tol: &Tolerances,
) -> Result<ChshReport<f64>, CcError> {
    let joint = |x: &Projection, y: &Projection| -> Result<f64, CcError> {
        state_value(qs, &meet_commuting(x, y, tol)?, tol)
    };
    let terms = [joint(a1, b1)?, joint(a1, b2)?, joint(a2, b1)?, joint(a2, b2)?];
    let value = terms[0] + terms[1] + terms[2] - terms[3];
    let satisfied = value.abs() <= 2.0 + tol.equality;
    Ok(ChshReport { value, satisfied, terms })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CccFinding {
    pub event: Event,
    /// One verdict per input pair, in input order.
    pub verdicts: Vec<CcVerdict>,
}

/// First event (in ascending bitmask order) that is a common cause of
/// every listed pair. Properness is not required: a shared direct link
/// still supports the Bell derivation.
pub fn find_common_common_cause(
    space: &AtomicSpace,
    pairs: &[(Event, Event)],
    limit: usize,
) -> Result<Option<CccFinding>, CcError> {
    for (a, b) in pairs {
        if !space.is_correlated(a, b)? {
            return Err(CcError::NotCorrelated);
        }
    }
    space.check_enum_limit(limit)?;
    let n = space.atom_count();
    let hit = (0u64..(1u64 << n)).into_par_iter().find_first(|&mask| {
        let c = space.event_from_mask(mask);
        pairs.iter().all(|(a, b)| {
            matches!(check_common_cause(space, a, b, &c), Ok(v) if v.is_common_cause)
        })
    });
    Ok(hit.map(|mask| {
        let event = space.event_from_mask(mask);
        let verdicts = pairs
            .iter()
            .map(|(a, b)| check_common_cause(space, a, b, &event).expect("re-check passes"))
            .collect();
        CccFinding { event, verdicts }
    }))
}

/// The derivation as a checkable implication: if the four pairs share a
/// common cause, the probability-form CHSH combination of their joints
/// must satisfy the classical bound. Vacuously true when no shared cause
/// exists. The pairs are taken in the grid order
/// (A₁,B₁), (A₁,B₂), (A₂,B₁), (A₂,B₂).
pub fn ccc_implies_chsh_check(
    space: &AtomicSpace,
    pairs: &[(Event, Event); 4],
    limit: usize,
) -> Result<bool, CcError> {
    if find_common_common_cause(space, pairs, limit)?.is_none() {
        return Ok(true);
    }
    let joint = |p: &(Event, Event)| space.measure(&p.0.meet(&p.1)?);
    let value = joint(&pairs[0])? + joint(&pairs[1])? + joint(&pairs[2])? - joint(&pairs[3])?;
    Ok(value.abs() <= rat(2, 1))
}

/// Spin projection along the angle θ in the x–z plane of a qubit.
pub fn spin_projection(theta: f64) -> Projection {
    let v = CVec::from_vec(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::new((theta / 2.0).sin(), 0.0),
    ]);
    Projection::onto_vector(&v)
}

/// The singlet state on two qubits with the measurement angles
/// (0°, 90°) for the A side and (45°, 135°) for the B side, embedded so
/// that every A_i commutes with every B_j. The canonical demonstration
/// input for [`chsh_quantum`].
pub fn chsh_demo_configuration(tol: &Tolerances) -> (QuantumSpace, [Projection; 4]) {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = CVec::zeros(4);
    psi[1] = C64::new(inv_sqrt2, 0.0);
    psi[2] = C64::new(-inv_sqrt2, 0.0);
    let w = &psi * psi.adjoint();
    let qs = QuantumSpace::new(w, tol).expect("singlet density is valid");

    let id: CMat = CMat::identity(2, 2);
    let pi = std::f64::consts::PI;
    let a = |theta: f64| {
        Projection::new(spin_projection(theta).matrix().kronecker(&id), tol).unwrap()
    };
    let b = |theta: f64| {
        Projection::new(id.kronecker(spin_projection(theta).matrix()), tol).unwrap()
    };
    (qs, [a(0.0), a(pi / 2.0), b(pi / 4.0), b(3.0 * pi / 4.0)])
}
