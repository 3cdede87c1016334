//! Block-diagonal canonical form of an antisymmetric field tensor.
//!
//! For a positive-definite `gamma` the routine finds a basis `B` (columns
//! are the new basis vectors) with `B^T gamma B = I` and
//! `B^T H B = Theta`, where `Theta` consists of `N` blocks
//! `[[0, chi_l], [-chi_l, 0]]` followed by `n - 2N` zero rows and columns.
//!
//! The tensor is whitened to `Ht = gamma^{-1/2} H gamma^{-1/2}` and the
//! planes are extracted one at a time from the symmetric positive
//! semidefinite matrix `-Ht^2` restricted to the orthogonal complement of
//! the planes already found. For a top eigenvector `v1` with eigenvalue
//! `chi^2` the partner is `v2 = -Ht v1 / chi`, which gives `v1 . Ht v2 = chi`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dynamics::ParticleState;
use crate::error::{Error, Result};
use crate::tensors::{ensure_dim, ensure_finite, ensure_square, ensure_symmetric};
use crate::tensors::{FieldTensor, MetricTensor, PhysicalConstants};

/// Relative cutoff below which a block frequency counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-10;

/// Scale-aware zero cutoff `1e-10 * max(1, |H|_F)`.
pub fn zero_threshold(h: &FieldTensor) -> f64 {
    ZERO_THRESHOLD * h.frobenius_norm().max(1.0)
}

/// Positive-definite tensor defining orthogonality of the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTensor {
    gamma: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
}

impl GammaTensor {
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        ensure_square(&gamma)?;
        ensure_finite(&gamma, "gamma tensor")?;
        ensure_symmetric(&gamma)?;
        let gamma = (&gamma + gamma.transpose()) * 0.5;
        let eigen = SymmetricEigen::new(gamma.clone());
        let smallest = eigen.eigenvalues.min();
        if smallest <= 0.0 {
            return Err(Error::NotPositiveDefinite(smallest));
        }
        let inv_sqrt_diag = eigen.eigenvalues.map(|l| 1.0 / l.sqrt());
        let inv_sqrt = &eigen.eigenvectors
            * DMatrix::from_diagonal(&inv_sqrt_diag)
            * eigen.eigenvectors.transpose();
        let inv_sqrt = (&inv_sqrt + inv_sqrt.transpose()) * 0.5;
        Ok(Self { gamma, inv_sqrt })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            gamma: DMatrix::identity(n, n),
            inv_sqrt: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    /// Symmetric inverse square root `gamma^{-1/2}`.
    pub fn inv_sqrt(&self) -> &DMatrix<f64> {
        &self.inv_sqrt
    }

    /// Distance from `g`'s covariant components, max-abs entrywise.
    pub fn distance_to(&self, g: &MetricTensor) -> f64 {
        if g.dim() != self.dim() {
            return f64::INFINITY;
        }
        (&self.gamma - g.covariant()).amax()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    basis: DMatrix<f64>,
    chis: Vec<f64>,
    gamma: GammaTensor,
}

/// Canonical-basis position and rescaled momenta (both include `c/q`).
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCoords {
    pub xi: DVector<f64>,
    pub pi: DVector<f64>,
    pub pi_dual: DVector<f64>,
}

fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-8 * scale) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

fn complement_projector(n: usize, produced: &[DVector<f64>]) -> DMatrix<f64> {
    let mut p = DMatrix::identity(n, n);
    for u in produced {
        p -= u * u.transpose();
    }
    p
}

fn orthonormalize_against(v: &mut DVector<f64>, produced: &[DVector<f64>]) {
    // two passes keep the loss of orthogonality at rounding level
    for _ in 0..2 {
        for u in produced {
            let overlap = u.dot(v);
            v.axpy(-overlap, u, 1.0);
        }
    }
    let norm = v.norm();
    if norm > 0.0 {
        *v /= norm;
    }
}

/// Computes the canonical form of `h` with respect to `gamma`.
pub fn decompose(h: &FieldTensor, gamma: &GammaTensor) -> Result<CanonicalForm> {
    let n = h.dim();
    ensure_dim(n, gamma.dim())?;
    let whitened = gamma.inv_sqrt() * h.matrix() * gamma.inv_sqrt();
    let whitened = (&whitened - whitened.transpose()) * 0.5;
    let threshold = zero_threshold(h);

    let mut produced: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();
    while produced.len() + 2 <= n {
        let projector = complement_projector(n, &produced);
        let restricted = &projector * &whitened * &projector;
        let squared = restricted.tr_mul(&restricted);
        let eigen = SymmetricEigen::new((&squared + squared.transpose()) * 0.5);
        let top = eigen.eigenvalues.imax();
        let mut v1: DVector<f64> = eigen.eigenvectors.column(top).into_owned();
        orthonormalize_against(&mut v1, &produced);
        fix_sign(&mut v1);
        let image = &whitened * &v1;
        let chi = image.norm();
        if chi <= threshold {
            break;
        }
        let mut v2 = -image / chi;
        orthonormalize_against(&mut v2, &produced);
        orthonormalize_against(&mut v2, std::slice::from_ref(&v1));
        produced.push(v1.clone());
        produced.push(v2.clone());
        pairs.push((chi, v1, v2));
    }

    // stable sort keeps extraction order among equal frequencies
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut chis = Vec::with_capacity(pairs.len());
    for (chi, v1, v2) in pairs {
        chis.push(chi);
        columns.push(v1);
        columns.push(v2);
    }

    if columns.len() < n {
        let projector = complement_projector(n, &columns);
        let eigen = SymmetricEigen::new((&projector + projector.transpose()) * 0.5);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
        let mut free: Vec<DVector<f64>> = Vec::new();
        for idx in order.into_iter().take(n - columns.len()) {
            let mut v: DVector<f64> = eigen.eigenvectors.column(idx).into_owned();
            orthonormalize_against(&mut v, &columns);
            orthonormalize_against(&mut v, &free);
            fix_sign(&mut v);
            free.push(v);
        }
        columns.extend(free);
    }

    let q = DMatrix::from_columns(&columns);
    let basis = gamma.inv_sqrt() * q;
    Ok(CanonicalForm {
        basis,
        chis,
        gamma: gamma.clone(),
    })
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Basis matrix `B`; column `alpha` is the basis vector in old coordinates.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Block frequencies, strictly positive and sorted descending.
    pub fn chis(&self) -> &[f64] {
        &self.chis
    }

    pub fn block_count(&self) -> usize {
        self.chis.len()
    }

    pub fn free_dims(&self) -> usize {
        self.dim() - 2 * self.block_count()
    }

    pub fn gamma(&self) -> &GammaTensor {
        &self.gamma
    }

    /// The block-diagonal tensor in the canonical basis.
    pub fn theta(&self) -> DMatrix<f64> {
        theta_from_chis(&self.chis, self.dim())
    }

    /// `B^{-1} = B^T gamma`, mapping old coordinates to canonical ones.
    pub fn inverse_basis(&self) -> DMatrix<f64> {
        self.basis.transpose() * self.gamma.matrix()
    }

    /// Frobenius norm of `gamma B Theta B^T gamma - H`, which vanishes when
    /// `B^T H B = Theta` and `B^T gamma B = I`.
    pub fn reconstruction_residual(&self, h: &FieldTensor) -> f64 {
        let gb = self.gamma.matrix() * &self.basis;
        (&gb * self.theta() * gb.transpose() - h.matrix()).norm()
    }

    /// Max-abs deviation of `B^T gamma B` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        (self.basis.transpose() * self.gamma.matrix() * &self.basis
            - DMatrix::<f64>::identity(n, n))
        .amax()
    }

    /// Indices of basis vectors whose `g`-norm `|e^T g e|` falls below the
    /// zero threshold. Only possible for indefinite metrics.
    pub fn g_singular_vectors(&self, g: &MetricTensor) -> Vec<usize> {
        self.basis
            .column_iter()
            .enumerate()
            .filter(|(_, e)| (e.transpose() * g.covariant() * e)[(0, 0)].abs() <= ZERO_THRESHOLD)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Assembles `Theta` with blocks `[[0, chi], [-chi, 0]]` on the diagonal.
pub fn theta_from_chis(chis: &[f64], n: usize) -> DMatrix<f64> {
    let mut theta = DMatrix::zeros(n, n);
    for (l, &chi) in chis.iter().enumerate() {
        theta[(2 * l, 2 * l + 1)] = chi;
        theta[(2 * l + 1, 2 * l)] = -chi;
    }
    theta
}

/// Expresses a particle state in the canonical basis.
///
/// `xi = B^{-1} x`, `pi = (c/q) B^T p` and `pi_dual = (c/q) B^T p^T` with
/// `p^T = p - (q/c) H x`, so that `Theta xi = pi - pi_dual`.
pub fn to_canonical(
    form: &CanonicalForm,
    state: &ParticleState,
    h: &FieldTensor,
    constants: &PhysicalConstants,
) -> Result<CanonicalCoords> {
    let n = form.dim();
    ensure_dim(n, h.dim())?;
    ensure_dim(n, state.dim())?;
    let inv_coupling = 1.0 / constants.coupling();
    let xi = form.inverse_basis() * &state.x;
    let pi = form.basis.tr_mul(&state.p) * inv_coupling;
    let dual = &state.p - h.matrix() * &state.x * constants.coupling();
    let pi_dual = form.basis.tr_mul(&dual) * inv_coupling;
    Ok(CanonicalCoords { xi, pi, pi_dual })
}

impl CanonicalCoords {
    /// `Theta xi - (pi - pi_dual)`, max-abs.
    pub fn identity_residual(&self, form: &CanonicalForm) -> f64 {
        (form.theta() * &self.xi - (&self.pi - &self.pi_dual)).amax()
    }
}
