//! Metric tensors, linear gauges and the constant field tensor they determine.
//!
//! Index convention: a linear gauge is stored as the matrix `A` with the
//! vector potential `A_j(x) = A[(k, j)] x^k`, i.e. the row index is contracted
//! against the position. The field is then `H = A - A^T`. Using the transposed
//! convention flips the sign of `H`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Absolute tolerance for antisymmetry of externally supplied field tensors.
pub const ANTISYMMETRY_TOL: f64 = 1e-14;
/// Relative tolerance for symmetry of metric-like tensors.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub(crate) fn ensure_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyDimension);
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_finite(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Checks symmetry to `SYMMETRY_TOL` relative to the largest entry.
pub(crate) fn ensure_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let n = m.nrows();
    for j in 0..n {
        for k in (j + 1)..n {
            let residual = (m[(j, k)] - m[(k, j)]).abs();
            if residual > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric {
                    row: j,
                    col: k,
                    residual,
                });
            }
        }
    }
    Ok(())
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Particle constants in desk units. Defaults are `m = q = c = hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub mass: f64,
    pub charge: f64,
    pub light_speed: f64,
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            mass: 1.0,
            charge: 1.0,
            light_speed: 1.0,
            hbar: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn new(mass: f64, charge: f64, light_speed: f64, hbar: f64) -> Result<Self> {
        let positive = |name, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConstant { name, value })
            }
        };
        positive("mass", mass)?;
        positive("light_speed", light_speed)?;
        positive("hbar", hbar)?;
        if !charge.is_finite() || charge == 0.0 {
            return Err(Error::InvalidConstant {
                name: "charge",
                value: charge,
            });
        }
        Ok(Self {
            mass,
            charge,
            light_speed,
            hbar,
        })
    }

    /// `q / c`, the coupling between field and momentum.
    pub fn coupling(&self) -> f64 {
        self.charge / self.light_speed
    }

    /// `q / (m c)`, the prefactor of the momentum equation of motion.
    pub fn gyro_ratio(&self) -> f64 {
        self.charge / (self.mass * self.light_speed)
    }
}

/// Covariant metric `g_{jk}` together with its inverse `g^{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    signature: (usize, usize),
}

impl MetricTensor {
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        ensure_square(&g)?;
        ensure_finite(&g, "metric")?;
        ensure_symmetric(&g)?;
        let g = symmetrized(&g);
        let eigen = SymmetricEigen::new(g.clone());
        let scale = eigen.eigenvalues.amax();
        let cutoff = 1e-12 * scale;
        if scale == 0.0 || eigen.eigenvalues.iter().any(|l| l.abs() <= cutoff) {
            return Err(Error::SingularMetric);
        }
        let n_plus = eigen.eigenvalues.iter().filter(|&&l| l > 0.0).count();
        let n_minus = g.nrows() - n_plus;
        let g_inv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        let g_inv = symmetrized(&g_inv);
        Ok(Self {
            g,
            g_inv,
            signature: (n_plus, n_minus),
        })
    }

    pub fn euclidean(n: usize) -> Self {
        Self {
            g: DMatrix::identity(n, n),
            g_inv: DMatrix::identity(n, n),
            signature: (n, 0),
        }
    }

    /// `diag(1, ..., 1, -1)`: the last coordinate is time-like.
    pub fn minkowski(n: usize) -> Self {
        let mut g = DMatrix::identity(n, n);
        if n > 0 {
            g[(n - 1, n - 1)] = -1.0;
        }
        Self {
            g_inv: g.clone(),
            g,
            signature: (n.saturating_sub(1), usize::from(n > 0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Covariant components `g_{jk}`.
    pub fn covariant(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Contravariant components `g^{jk}`.
    pub fn contravariant(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    /// `(positive, negative)` eigenvalue counts.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    /// Raises a covariant index: `v^j = g^{jk} v_k`.
    pub fn raise(&self, covector: &DVector<f64>) -> DVector<f64> {
        &self.g_inv * covector
    }

    /// Lowers a contravariant index: `v_j = g_{jk} v^k`.
    pub fn lower(&self, vector: &DVector<f64>) -> DVector<f64> {
        &self.g * vector
    }
}

/// Constant matrix of a linear gauge, `A_j(x) = A[(k, j)] x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeMatrix(DMatrix<f64>);

impl GaugeMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        ensure_square(&a)?;
        ensure_finite(&a, "gauge matrix")?;
        Ok(Self(a))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Vector potential `A_j(x)` at position `x`.
    pub fn potential_at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.tr_mul(x)
    }
}

/// Antisymmetric field tensor `H_{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTensor(DMatrix<f64>);

impl FieldTensor {
    /// Validates external input: `|H_jk + H_kj| <= 1e-14` and a zero diagonal
    /// within the same tolerance. The stored matrix is exactly antisymmetric.
    pub fn new(h: DMatrix<f64>) -> Result<Self> {
        let n = ensure_square(&h)?;
        ensure_finite(&h, "field tensor")?;
        for j in 0..n {
            for k in j..n {
                let residual = (h[(j, k)] + h[(k, j)]).abs();
                if residual > ANTISYMMETRY_TOL {
                    return Err(Error::NotAntisymmetric {
                        row: j,
                        col: k,
                        residual,
                    });
                }
            }
        }
        Ok(Self((&h - h.transpose()) * 0.5))
    }

    pub fn zero(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(&self.0 * factor)
    }

    /// The associated field of the transposed gauge, `H^T_{jk} = -H_{jk}`.
    pub fn associated(&self) -> Self {
        Self(-&self.0)
    }
}

/// `H_{jk} = A_{jk} - A_{kj}`. Exactly antisymmetric in floating point.
pub fn field_from_gauge(a: &GaugeMatrix) -> FieldTensor {
    let a = a.matrix();
    let n = a.nrows();
    FieldTensor(DMatrix::from_fn(n, n, |j, k| a[(j, k)] - a[(k, j)]))
}

/// Symmetric (Brown–Zak) gauge `A = H / 2`.
pub fn gauge_antisymmetric(h: &FieldTensor) -> GaugeMatrix {
    GaugeMatrix(h.matrix() * 0.5)
}

/// Generalized Landau gauge: the strictly upper-triangular part of `H`.
pub fn gauge_triangular(h: &FieldTensor) -> GaugeMatrix {
    let h = h.matrix();
    let n = h.nrows();
    GaugeMatrix(DMatrix::from_fn(n, n, |k, j| if k < j { h[(k, j)] } else { 0.0 }))
}

/// Residual `|g^{jk} A_{jk}|` of the radiation-gauge condition.
pub fn check_radiation_gauge(a: &GaugeMatrix, g: &MetricTensor) -> Result<f64> {
    ensure_dim(g.dim(), a.dim())?;
    Ok(g.contravariant().component_mul(a.matrix()).sum().abs())
}

/// Three-dimensional field vector to tensor form, `H_{jk} = eps_{jkm} B^m`.
pub fn field_from_3d_vector(b: [f64; 3]) -> FieldTensor {
    let [b1, b2, b3] = b;
    FieldTensor(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, b3, -b2, -b3, 0.0, b1, b2, -b1, 0.0],
    ))
}
