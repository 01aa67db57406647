//! Seeded generators for randomized verification.
//!
//! Everything here is deterministic given the seed; verification reports
//! quote the seed so runs are reproducible byte for byte.

use nalgebra::linalg::QR;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CcError;
use crate::event_algebra::{AtomicSpace, Event};
use crate::quantum_space::{C64, CMat, Projection, QuantumSpace, Tolerances};
use crate::rational::{rat, Rat};
use crate::reichenbach::{parameter_bounds, type_from_params, CcType};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_complex_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(dim, dim, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    QR::new(random_complex_matrix(dim, rng)).q()
}

/// Rank-r projection with a random range.
pub fn random_projection(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Projection {
    debug_assert!(rank <= dim);
    let u = random_unitary(dim, rng);
    let cols = u.columns(0, rank);
    Projection::new(&cols * cols.adjoint(), &Tolerances::default())
        .expect("isometry columns give a projection")
}

/// Nontrivial projection of a random rank in 1..dim.
pub fn random_projection_any(dim: usize, rng: &mut ChaCha8Rng) -> Projection {
    let rank = rng.random_range(1..dim);
    random_projection(dim, rank, rng)
}

/// Full-rank-ish density matrix U diag(p) U† with a random spectrum.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng, tol: &Tolerances) -> QuantumSpace {
    let mut probs: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    let u = random_unitary(dim, rng);
    let diag = CMat::from_fn(dim, dim, |i, j| {
        if i == j { C64::new(probs[i], 0.0) } else { C64::zero() }
    });
    let w = &u * diag * u.adjoint();
    let w = (&w + w.adjoint()).scale(0.5);
    // exact trace normalization eats the rounding of the conjugation
    let tr = w.trace().re;
    QuantumSpace::new(w.unscale(tr), tol).expect("constructed density is valid")
}

/// A pair of distinct commuting projections drawn from a shared random
/// eigenbasis, via complementary-free 0/1 diagonal masks.
pub fn random_commuting_pair(
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> (Projection, Projection) {
    let u = random_unitary(dim, rng);
    let tol = Tolerances::default();
    loop {
        let ma: Vec<bool> = (0..dim).map(|_| rng.random()).collect();
        let mb: Vec<bool> = (0..dim).map(|_| rng.random()).collect();
        if ma.iter().all(|&x| !x) || ma.iter().all(|&x| x) {
            continue;
        }
        if mb.iter().all(|&x| !x) || mb.iter().all(|&x| x) {
            continue;
        }
        let conj = |mask: &[bool]| {
            let d = Projection::from_diag_mask(mask);
            Projection::new(&u * d.matrix() * u.adjoint(), &tol)
                .expect("conjugated mask is a projection")
        };
        return (conj(&ma), conj(&mb));
    }
}

/// Random space with the given atom count: integer weights normalized to
/// a common denominator, occasional zero atoms included.
pub fn random_space(n_atoms: usize, rng: &mut ChaCha8Rng) -> AtomicSpace {
    loop {
        let ks: Vec<u32> = (0..n_atoms)
            .map(|_| if rng.random_range(0..6u8) == 0 { 0 } else { rng.random_range(1..=12u32) })
            .collect();
        let total: u32 = ks.iter().sum();
        if total == 0 {
            continue;
        }
        let atoms = ks
            .iter()
            .enumerate()
            .map(|(i, &k)| (format!("w{i}"), rat(k as i64, total as i64)))
            .collect();
        return AtomicSpace::new(atoms).expect("normalized weights sum to 1");
    }
}

pub fn random_event(space: &AtomicSpace, rng: &mut ChaCha8Rng) -> Event {
    let n = space.atom_count();
    let indices = (0..n).filter(|_| rng.random::<bool>());
    space.event_from_indices(indices).unwrap()
}

/// A positively correlated pair of events, or None if none shows up
/// within `tries` draws.
pub fn random_correlated_pair(
    space: &AtomicSpace,
    rng: &mut ChaCha8Rng,
    tries: usize,
) -> Option<(Event, Event)> {
    for _ in 0..tries {
        let a = random_event(space, rng);
        let b = random_event(space, rng);
        if a == b {
            continue;
        }
        if space.is_correlated(&a, &b).unwrap() {
            return Some((a, b));
        }
    }
    None
}

/// Exact rational marginals (μ_a, μ_b, μ_ab) of a strictly correlated
/// pair, drawn from random integer cell masses.
pub fn random_correlated_triple(rng: &mut ChaCha8Rng) -> (Rat, Rat, Rat) {
    loop {
        let cells: Vec<i64> = (0..4).map(|_| rng.random_range(0..=12i64)).collect();
        let total: i64 = cells.iter().sum();
        if total == 0 {
            continue;
        }
        let mu_a = rat(cells[0] + cells[1], total);
        let mu_b = rat(cells[0] + cells[2], total);
        let mu_ab = rat(cells[0], total);
        if mu_ab > &mu_a * &mu_b {
            return (mu_a, mu_b, mu_ab);
        }
    }
}

/// Exact rational marginals from measured state values. Floating-point
/// dirt can leave the joint a few ulps above a marginal; the joint is
/// clamped back so the triple is consistent.
pub fn dyadic_marginals(
    phi_a: f64,
    phi_b: f64,
    phi_ab: f64,
) -> Result<(Rat, Rat, Rat), CcError> {
    let mu_a = crate::rational::from_f64(phi_a)?;
    let mu_b = crate::rational::from_f64(phi_b)?;
    let mu_ab = crate::rational::from_f64(phi_ab)?;
    let cap = mu_a.clone().min(mu_b.clone());
    Ok((mu_a, mu_b, mu_ab.min(cap)))
}

/// A random admissible type for the given correlated marginals, sampled
/// on a rational grid over the parameter rectangle.
pub fn random_admissible_type(
    mu_a: &Rat,
    mu_b: &Rat,
    mu_ab: &Rat,
    rng: &mut ChaCha8Rng,
) -> Result<CcType, CcError> {
    let (t_min, s_min) = parameter_bounds(mu_a, mu_b, mu_ab)?;
    let one = rat(1, 1);
    let t = &t_min + (&one - &t_min) * rat(rng.random_range(0..=8), 8);
    let s = &s_min + (&one - &s_min) * rat(rng.random_range(0..=8), 8);
    type_from_params(mu_a, mu_b, mu_ab, &t, &s)
}
