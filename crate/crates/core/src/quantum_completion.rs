//! Extension of a quantum probability space hosting common causes for
//! commuting correlated pairs of any admissible type.
//!
//! The extension doubles the space to H⊕H with state ½W⊕½W, spectrally
//! decomposes that density into K weighted unit vectors ψ_k, and forms
//! the block space of K copies of H⊕H. The state W′ puts mass λ_k on ψ_k
//! in block k; a projection X embeds blockwise as X⊕X, which preserves
//! the state exactly.
//!
//! A common cause for (A, B) is assembled per block and per joint cell
//! Q ∈ {A∧B⊥, A∧B, A⊥∧B, A⊥∧B⊥}: the block's cell vector is tilted
//! between the normalized cell component of ψ_k and an orthogonal
//! direction inside the cell, with cos²ω = ρ_Q / φ(Q) chosen so that the
//! λ-weighted overlaps telescope to exactly the cell mass ρ_Q the
//! requested type prescribes. Cells of different kinds are orthogonal,
//! so the rank-one pieces sum to a projection commuting with h(A), h(B).

use nalgebra::linalg::SymmetricEigen;

use crate::error::CcError;
use crate::quantum_space::{
    check_quantum_common_cause, max_norm, meet_commuting, state_value, C64, CMat, CVec,
    Projection, QuantumSpace, Tolerances,
};
use crate::rational::to_f64;
use crate::reichenbach::{CcType, CcVerdict};
use crate::sampling::{random_projection_any, rng_from_seed};

/// X ⊕ X on the doubled space.
pub fn doubled(x: &CMat) -> CMat {
    let n = x.nrows();
    let mut out = CMat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(x);
    out.view_mut((n, n), (n, n)).copy_from(x);
    out
}

/// Blockwise embedding of a source space into K copies of its doubling,
/// together with the spectral data (λ_k, ψ_k) of ½W⊕½W that defines the
/// extended state.
#[derive(Debug, Clone)]
pub struct QEmbedding {
    block_weights: Vec<f64>,
    block_vectors: Vec<CVec>,
    source_dim: usize,
}

impl QEmbedding {
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn block_count(&self) -> usize {
        self.block_weights.len()
    }

    pub fn target_dim(&self) -> usize {
        self.block_count() * 2 * self.source_dim
    }

    pub fn block_weights(&self) -> &[f64] {
        &self.block_weights
    }

    pub fn block_vectors(&self) -> &[CVec] {
        &self.block_vectors
    }

    /// h(X): the doubled matrix repeated along the block diagonal.
    pub fn embed_matrix(&self, x: &CMat) -> CMat {
        let d = doubled(x);
        let m = d.nrows();
        let mut out = CMat::zeros(self.target_dim(), self.target_dim());
        for k in 0..self.block_count() {
            out.view_mut((k * m, k * m), (m, m)).copy_from(&d);
        }
        out
    }

    pub fn embed(&self, p: &Projection, tol: &Tolerances) -> Result<Projection, CcError> {
        if p.dim() != self.source_dim {
            return Err(CcError::DimensionMismatch { left: p.dim(), right: self.source_dim });
        }
        Projection::new(self.embed_matrix(p.matrix()), tol)
    }

    /// φ′(h(X)) evaluated blockwise: Σ_k λ_k ⟨ψ_k, (X⊕X) ψ_k⟩. Identical
    /// to the trace against the extended density, without forming it.
    pub fn embedded_state_value(&self, x: &CMat) -> f64 {
        let d = doubled(x);
        self.block_weights
            .iter()
            .zip(&self.block_vectors)
            .map(|(l, psi)| l * psi.dotc(&(&d * psi)).re)
            .sum()
    }
}

/// Spectral decomposition of ½W⊕½W into strictly positive eigenvalues
/// and phase-fixed unit eigenvectors, deterministically ordered.
pub fn spectral_decompose(
    qs: &QuantumSpace,
    tol: &Tolerances,
) -> Result<Vec<(f64, CVec)>, CcError> {
    let d = doubled(qs.density()).scale(0.5);
    let eig = SymmetricEigen::new(d.clone());
    if let Some(&bad) = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l < -tol.psd)
        .min_by(|a, b| a.total_cmp(b))
    {
        return Err(CcError::NotPositive { eigenvalue: bad });
    }

    let mut terms: Vec<(f64, CVec)> = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= tol.psd {
            continue;
        }
        let mut v = eig.eigenvectors.column(i).into_owned();
        if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-8) {
            v *= z.conj() / C64::new(z.norm(), 0.0);
        }
        terms.push((lambda, v));
    }
    let total: f64 = terms.iter().map(|(l, _)| l).sum();
    for (l, _) in &mut terms {
        *l /= total;
    }
    terms.sort_by(|(la, va), (lb, vb)| {
        lb.total_cmp(la).then_with(|| {
            for (x, y) in va.iter().zip(vb.iter()) {
                let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    let mut recon = CMat::zeros(d.nrows(), d.ncols());
    for (l, v) in &terms {
        recon += (v * v.adjoint()).scale(*l);
    }
    let err = max_norm(&(&recon - &d));
    assert!(err <= 1e-10, "spectral reconstruction error {err:.3e} above 1e-10");
    Ok(terms)
}

/// Builds the extended space and the embedding into it.
pub fn build_extension(
    qs: &QuantumSpace,
    tol: &Tolerances,
) -> Result<(QuantumSpace, QEmbedding), CcError> {
    let terms = spectral_decompose(qs, tol)?;
    let n2 = 2 * qs.dim();
    let k = terms.len();
    let mut density = CMat::zeros(k * n2, k * n2);
    for (i, (l, v)) in terms.iter().enumerate() {
        density
            .view_mut((i * n2, i * n2), (n2, n2))
            .copy_from(&(v * v.adjoint()).scale(*l));
    }
    let (block_weights, block_vectors) = terms.into_iter().unzip();
    let emb = QEmbedding { block_weights, block_vectors, source_dim: qs.dim() };
    Ok((QuantumSpace::new(density, tol)?, emb))
}

/// Joint cells of a commuting pair in the fixed order
/// [A∧B⊥, A∧B, A⊥∧B, A⊥∧B⊥].
fn cell_matrices(a: &Projection, b: &Projection) -> [CMat; 4] {
    let symmetrize = |m: CMat| (&m + m.adjoint()).scale(0.5);
    let bp = b.complement();
    let ap = a.complement();
    [
        symmetrize(a.matrix() * bp.matrix()),
        symmetrize(a.matrix() * b.matrix()),
        symmetrize(ap.matrix() * b.matrix()),
        symmetrize(ap.matrix() * bp.matrix()),
    ]
}

/// Target masses ρ_Q = r_C · P(cell | C) per cell, same order.
fn rho_weights(ct: &CcType) -> [f64; 4] {
    let r_c = to_f64(&ct.r_c);
    let t = to_f64(&ct.r_a_given_c);
    let s = to_f64(&ct.r_b_given_c);
    [
        r_c * t * (1.0 - s),
        r_c * t * s,
        r_c * (1.0 - t) * s,
        r_c * (1.0 - t) * (1.0 - s),
    ]
}

/// First unit direction in the range of `q` orthogonal to `v1`, found by
/// a Gram–Schmidt sweep of the canonical basis.
fn orthogonal_direction(q: &CMat, v1: &CVec) -> Result<CVec, CcError> {
    let dim = q.nrows();
    for j in 0..dim {
        let col: CVec = q.column(j).into_owned();
        let w = &col - v1.scale(1.0) * v1.dotc(&col);
        let norm = w.norm();
        if norm > 1e-4 {
            return Ok(w.unscale(norm));
        }
    }
    Err(CcError::CellDimensionTooSmall { dim })
}

/// The four cell families P_α, P_β, P_γ, P_δ of the common-cause
/// construction, as matrices on the extended space. A cell with state
/// mass at most `tol.equality` is omitted entirely; for the rest,
/// cos²ω = ρ_Q/φ(Q) must land in [0, 1] or the type was not admissible.
pub fn cause_cell_projections(
    emb: &QEmbedding,
    a: &Projection,
    b: &Projection,
    ct: &CcType,
    tol: &Tolerances,
) -> Result<[CMat; 4], CcError> {
    for p in [a, b] {
        if p.dim() != emb.source_dim() {
            return Err(CcError::DimensionMismatch { left: p.dim(), right: emb.source_dim() });
        }
    }
    if !crate::quantum_space::commutes(a, b, tol)? {
        return Err(CcError::NonCommuting);
    }
    let phi = |x: &CMat| emb.embedded_state_value(x);
    let corr = phi(&(cell_matrices(a, b)[1].clone()))
        - phi(a.matrix()) * phi(b.matrix());
    if corr <= 0.0 {
        return Err(CcError::NotCorrelated);
    }

    let n2 = 2 * emb.source_dim();
    let dim = emb.target_dim();
    let cells = cell_matrices(a, b);
    let rho = rho_weights(ct);
    let mut out = [CMat::zeros(dim, dim), CMat::zeros(dim, dim), CMat::zeros(dim, dim), CMat::zeros(dim, dim)];

    for (ci, cell) in cells.iter().enumerate() {
        let phi_q = phi(cell);
        if phi_q <= tol.equality {
            continue;
        }
        let cos2 = rho[ci] / phi_q;
        if !(-tol.equality..=1.0 + tol.equality).contains(&cos2) {
            return Err(CcError::CosineOutOfRange { value: cos2 });
        }
        let cos2 = cos2.clamp(0.0, 1.0);
        let (cos_w, sin_w) = (cos2.sqrt(), (1.0 - cos2).sqrt());
        let qd = doubled(cell);
        for (k, psi) in emb.block_vectors().iter().enumerate() {
            let qpsi = &qd * psi;
            let qk = psi.dotc(&qpsi).re;
            if qk <= tol.equality {
                continue;
            }
            let v1 = qpsi.unscale(qpsi.norm());
            let u = if sin_w > tol.equality {
                let v2 = orthogonal_direction(&qd, &v1)?;
                v1.scale(cos_w) + v2.scale(sin_w)
            } else {
                v1
            };
            let mut block = out[ci].view_mut((k * n2, k * n2), (n2, n2));
            block += &u * u.adjoint();
        }
    }
    Ok(out)
}

/// C = P_α ∨ P_β ∨ P_γ ∨ P_δ. The four families live on pairwise
/// orthogonal cells, so the join is their sum.
pub fn construct_common_cause(
    ext: &QuantumSpace,
    emb: &QEmbedding,
    a: &Projection,
    b: &Projection,
    ct: &CcType,
    tol: &Tolerances,
) -> Result<Projection, CcError> {
    if ext.dim() != emb.target_dim() {
        return Err(CcError::DimensionMismatch { left: ext.dim(), right: emb.target_dim() });
    }
    let parts = cause_cell_projections(emb, a, b, ct, tol)?;
    let mut sum = CMat::zeros(ext.dim(), ext.dim());
    for p in &parts {
        sum += p;
    }
    Projection::new(sum, tol)
}

#[derive(Debug, Clone)]
pub struct QuantumCauseEntry {
    pub pair_index: usize,
    pub requested: CcType,
    /// (φ′(C), φ′(hA|C), φ′(hB|C), φ′(hA|C⊥), φ′(hB|C⊥)) as measured.
    pub measured: [f64; 5],
    pub type_matches: bool,
    pub verdict: CcVerdict,
}

#[derive(Debug, Clone, Copy)]
pub struct FidelityCheck {
    pub samples: usize,
    pub seed: u64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct QuantumCompletionReport {
    pub extension: QuantumSpace,
    pub embedding: QEmbedding,
    pub causes: Vec<Projection>,
    pub entries: Vec<QuantumCauseEntry>,
    pub fidelity: FidelityCheck,
    /// Pairwise commutation of the constructed causes; distinct causes
    /// need not commute, so this is reported rather than enforced.
    pub cause_commutes: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy)]
pub struct QCompleteOptions {
    pub fidelity_samples: usize,
    pub seed: u64,
}

impl Default for QCompleteOptions {
    fn default() -> Self {
        QCompleteOptions { fidelity_samples: 100, seed: 0 }
    }
}

pub fn measured_quintuple(
    ext: &QuantumSpace,
    ha: &Projection,
    hb: &Projection,
    c: &Projection,
    tol: &Tolerances,
) -> Result<[f64; 5], CcError> {
    let cp = c.complement();
    let phi = |p: &Projection| state_value(ext, p, tol);
    let phi_c = phi(c)?;
    let phi_cp = phi(&cp)?;
    Ok([
        phi_c,
        phi(&meet_commuting(ha, c, tol)?)? / phi_c,
        phi(&meet_commuting(hb, c, tol)?)? / phi_c,
        phi(&meet_commuting(ha, &cp, tol)?)? / phi_cp,
        phi(&meet_commuting(hb, &cp, tol)?)? / phi_cp,
    ])
}

/// Builds one extension and constructs a verified common cause in it per
/// request. Verification is not trusted construction: each cause goes
/// through [`check_quantum_common_cause`] in the extended space and its
/// measured quintuple is compared against the requested type.
pub fn complete_quantum(
    qs: &QuantumSpace,
    requests: &[(Projection, Projection, CcType)],
    tol: &Tolerances,
    opts: &QCompleteOptions,
) -> Result<QuantumCompletionReport, CcError> {
    let (ext, emb) = build_extension(qs, tol)?;

    let mut causes = Vec::with_capacity(requests.len());
    let mut entries = Vec::with_capacity(requests.len());
    for (i, (a, b, ct)) in requests.iter().enumerate() {
        let c = construct_common_cause(&ext, &emb, a, b, ct, tol)?;
        let ha = emb.embed(a, tol)?;
        let hb = emb.embed(b, tol)?;
        let verdict = check_quantum_common_cause(&ext, &ha, &hb, &c, tol)?;
        let measured = measured_quintuple(&ext, &ha, &hb, &c, tol)?;
        let requested = [
            to_f64(&ct.r_c),
            to_f64(&ct.r_a_given_c),
            to_f64(&ct.r_b_given_c),
            to_f64(&ct.r_a_given_cperp),
            to_f64(&ct.r_b_given_cperp),
        ];
        let type_matches = measured
            .iter()
            .zip(&requested)
            .all(|(m, r)| (m - r).abs() <= tol.equality);
        entries.push(QuantumCauseEntry {
            pair_index: i,
            requested: ct.clone(),
            measured,
            type_matches,
            verdict,
        });
        causes.push(c);
    }

    let mut rng = rng_from_seed(opts.seed);
    let mut max_deviation: f64 = 0.0;
    let samples = if qs.dim() >= 2 { opts.fidelity_samples } else { 0 };
    for _ in 0..samples {
        let x = random_projection_any(qs.dim(), &mut rng);
        let hx = emb.embed(&x, tol)?;
        let dev = (state_value(&ext, &hx, tol)? - state_value(qs, &x, tol)?).abs();
        max_deviation = max_deviation.max(dev);
    }

    let cause_commutes = causes
        .iter()
        .map(|x| {
            causes
                .iter()
                .map(|y| crate::quantum_space::commutes(x, y, tol).unwrap_or(false))
                .collect()
        })
        .collect();

    Ok(QuantumCompletionReport {
        extension: ext,
        embedding: emb,
        causes,
        entries,
        fidelity: FidelityCheck { samples, seed: opts.seed, max_deviation },
        cause_commutes,
    })
}
