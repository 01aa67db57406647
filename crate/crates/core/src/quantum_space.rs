//! Finite-dimensional quantum probability spaces: density-matrix states
//! on the lattice of projections, restricted to commuting events.
//!
//! The state of a projection X is φ(X) = Tr(W·X). Meets are only formed
//! for commuting projections, where the lattice meet coincides with the
//! operator product; everything else is out of scope by design. Checks
//! are numerical, governed by the explicit [`Tolerances`] bundle.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::CcError;
use crate::reichenbach::{CcClass, CcCondition, CcVerdict};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Numerical tolerances for quantum-side checks, on unit-scale matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity deviation allowed in a density matrix.
    pub hermitian: f64,
    /// Deviation from P = P* = P² allowed in a projection.
    pub projection: f64,
    /// Max-norm of a commutator still counted as commuting.
    pub commutator: f64,
    /// Slack for equality conditions between probabilities.
    pub equality: f64,
    /// Margin a strict inequality must clear.
    pub strict_margin: f64,
    /// Deviation of the trace of a density matrix from 1.
    pub trace: f64,
    /// Eigenvalues above -psd count as non-negative; eigenvalues at or
    /// below psd are treated as zero in spectral decompositions.
    pub psd: f64,
    /// State values this close to 0 or 1 are clamped onto the boundary.
    pub clamp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-9,
            projection: 1e-9,
            commutator: 1e-9,
            equality: 1e-9,
            strict_margin: 1e-7,
            trace: 1e-12,
            psd: 1e-12,
            clamp: 1e-9,
        }
    }
}

pub fn max_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &CMat) -> f64 {
    max_norm(&(m - m.adjoint()))
}

/// A density matrix state on a dim-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSpace {
    density: CMat,
}

impl QuantumSpace {
    pub fn new(density: CMat, tol: &Tolerances) -> Result<Self, CcError> {
        if !density.is_square() {
            return Err(CcError::InvalidDensity { reason: "matrix is not square".into() });
        }
        if density.nrows() == 0 {
            return Err(CcError::InvalidDensity { reason: "dimension zero".into() });
        }
        let dev = hermitian_deviation(&density);
        if dev > tol.hermitian {
            return Err(CcError::InvalidDensity {
                reason: format!("hermiticity deviation {dev:.3e}"),
            });
        }
        let trace = density.trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(CcError::InvalidDensity { reason: format!("trace is {trace}") });
        }
        let sym = (&density + density.adjoint()).scale(0.5);
        let eigs = sym.symmetric_eigenvalues();
        if let Some(bad) = eigs.iter().copied().find(|&l| l < -tol.psd) {
            return Err(CcError::NotPositive { eigenvalue: bad });
        }
        Ok(QuantumSpace { density })
    }

    pub fn dim(&self) -> usize {
        self.density.nrows()
    }

    pub fn density(&self) -> &CMat {
        &self.density
    }
}

/// An event: a Hermitian idempotent on the space.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: CMat,
}

impl Projection {
    pub fn new(matrix: CMat, tol: &Tolerances) -> Result<Self, CcError> {
        if !matrix.is_square() {
            return Err(CcError::InvalidProjection { reason: "matrix is not square".into() });
        }
        let herm = hermitian_deviation(&matrix);
        if herm > tol.projection {
            return Err(CcError::InvalidProjection {
                reason: format!("hermiticity deviation {herm:.3e}"),
            });
        }
        let idem = max_norm(&(&matrix * &matrix - &matrix));
        if idem > tol.projection {
            return Err(CcError::InvalidProjection {
                reason: format!("idempotency deviation {idem:.3e}"),
            });
        }
        Ok(Projection { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Projection { matrix: CMat::identity(dim, dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Projection { matrix: CMat::zeros(dim, dim) }
    }

    /// Diagonal projection with ones where `mask` holds.
    pub fn from_diag_mask(mask: &[bool]) -> Self {
        let dim = mask.len();
        let mut m = CMat::zeros(dim, dim);
        for (i, &on) in mask.iter().enumerate() {
            if on {
                m[(i, i)] = C64::new(1.0, 0.0);
            }
        }
        Projection { matrix: m }
    }

    /// Projection onto the span of a (not necessarily normalized) vector.
    pub fn onto_vector(v: &CVec) -> Self {
        let n = v.norm();
        let u = v.unscale(n);
        Projection { matrix: &u * u.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn complement(&self) -> Projection {
        Projection { matrix: CMat::identity(self.dim(), self.dim()) - &self.matrix }
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), CcError> {
    if left != right {
        return Err(CcError::DimensionMismatch { left, right });
    }
    Ok(())
}

/// φ(P) = Re Tr(W·P), clamped onto [0,1] when within `tol.clamp` of it.
pub fn state_value(qs: &QuantumSpace, p: &Projection, tol: &Tolerances) -> Result<f64, CcError> {
    check_dims(qs.dim(), p.dim())?;
    let v = (qs.density() * p.matrix()).trace().re;
    Ok(clamp_probability(v, tol))
}

pub(crate) fn clamp_probability(v: f64, tol: &Tolerances) -> f64 {
    if v < 0.0 && v >= -tol.clamp {
        0.0
    } else if v > 1.0 && v <= 1.0 + tol.clamp {
        1.0
    } else {
        v
    }
}

pub fn commutes(p: &Projection, q: &Projection, tol: &Tolerances) -> Result<bool, CcError> {
    check_dims(p.dim(), q.dim())?;
    let pq = p.matrix() * q.matrix();
    let qp = q.matrix() * p.matrix();
    Ok(max_norm(&(pq - qp)) <= tol.commutator)
}

/// Lattice meet of two commuting projections: their product, re-symmetrized.
pub fn meet_commuting(
    p: &Projection,
    q: &Projection,
    tol: &Tolerances,
) -> Result<Projection, CcError> {
    if !commutes(p, q, tol)? {
        return Err(CcError::NonCommuting);
    }
    let pq = p.matrix() * q.matrix();
    let sym = (&pq + pq.adjoint()).scale(0.5);
    Projection::new(sym, tol)
}

/// φ(A∧B) − φ(A)φ(B) for a commuting pair.
pub fn is_correlated_q(
    qs: &QuantumSpace,
    a: &Projection,
    b: &Projection,
    tol: &Tolerances,
) -> Result<f64, CcError> {
    check_dims(qs.dim(), a.dim())?;
    let ab = meet_commuting(a, b, tol)?;
    Ok(state_value(qs, &ab, tol)? - state_value(qs, a, tol)? * state_value(qs, b, tol)?)
}

/// Operator order c ≤ p for commuting projections: c·p = c.
fn dominated_by(c: &Projection, p: &Projection, tol: &Tolerances) -> bool {
    max_norm(&(c.matrix() * p.matrix() - c.matrix())) <= tol.projection
}

/// Symmetric difference of commuting projections: c + a − 2·c∧a.
fn symmetric_difference(c: &Projection, a: &Projection) -> CMat {
    let ca = c.matrix() * a.matrix();
    c.matrix() + a.matrix() - ca.scale(2.0)
}

/// The quantum Reichenbach check: `c` must commute with both events, the
/// two screening-off ratio identities must hold within `tol.equality`,
/// and both relevance inequalities must clear `tol.strict_margin`.
/// Properness is decided by the state mass of the symmetric differences.
pub fn check_quantum_common_cause(
    qs: &QuantumSpace,
    a: &Projection,
    b: &Projection,
    c: &Projection,
    tol: &Tolerances,
) -> Result<CcVerdict, CcError> {
    check_dims(qs.dim(), a.dim())?;
    for (x, y) in [(a, b), (c, a), (c, b)] {
        if !commutes(x, y, tol)? {
            return Err(CcError::NonCommuting);
        }
    }
    let cp = c.complement();
    let phi = |p: &Projection| state_value(qs, p, tol);
    let mu_a = phi(a)?;
    let mu_b = phi(b)?;
    let mu_c = phi(c)?;
    let mu_cp = phi(&cp)?;
    for (label, value) in [("A", mu_a), ("B", mu_b), ("C", mu_c), ("C⊥", mu_cp)] {
        if value <= tol.equality {
            return Err(CcError::ZeroProbabilityCondition { which: label.into() });
        }
    }

    let ab = meet_commuting(a, b, tol)?;
    let ac = meet_commuting(a, c, tol)?;
    let bc = meet_commuting(b, c, tol)?;
    let abc = meet_commuting(&ab, c, tol)?;
    let acp = meet_commuting(a, &cp, tol)?;
    let bcp = meet_commuting(b, &cp, tol)?;
    let abcp = meet_commuting(&ab, &cp, tol)?;

    let a_given_c = phi(&ac)? / mu_c;
    let b_given_c = phi(&bc)? / mu_c;
    let ab_given_c = phi(&abc)? / mu_c;
    let a_given_cp = phi(&acp)? / mu_cp;
    let b_given_cp = phi(&bcp)? / mu_cp;
    let ab_given_cp = phi(&abcp)? / mu_cp;

    let mut failed = Vec::new();
    if (ab_given_c - a_given_c * b_given_c).abs() > tol.equality {
        failed.push(CcCondition::ScreenOffC);
    }
    if (ab_given_cp - a_given_cp * b_given_cp).abs() > tol.equality {
        failed.push(CcCondition::ScreenOffCperp);
    }
    if a_given_c - a_given_cp <= tol.strict_margin {
        failed.push(CcCondition::RelevanceA);
    }
    if b_given_c - b_given_cp <= tol.strict_margin {
        failed.push(CcCondition::RelevanceB);
    }
    if !failed.is_empty() {
        return Ok(CcVerdict {
            is_common_cause: false,
            failed_conditions: failed,
            classification: Vec::new(),
        });
    }

    let mut classification = Vec::new();
    let diff_a = Projection::new(symmetric_difference(c, a), tol)?;
    let diff_b = Projection::new(symmetric_difference(c, b), tol)?;
    if phi(&diff_a)? > tol.equality && phi(&diff_b)? > tol.equality {
        classification.push(CcClass::Proper);
    }
    if dominated_by(c, &ab, tol) {
        classification.push(CcClass::Strong);
    }
    if !dominated_by(c, a, tol) && !dominated_by(c, b, tol) {
        classification.push(CcClass::GenuinelyProbabilistic);
    }
    if (a_given_c - 1.0).abs() <= tol.equality
        && (b_given_c - 1.0).abs() <= tol.equality
        && a_given_cp.abs() <= tol.equality
        && b_given_cp.abs() <= tol.equality
    {
        classification.push(CcClass::Deterministic);
    }
    Ok(CcVerdict { is_common_cause: true, failed_conditions: Vec::new(), classification })
}
