//! Exact algebra of first-order differential operators.
//!
//! An [`AffineOperator`] is `s + a_k x^k + b^k P_k` with the elementary
//! momentum `P_k = -i hbar d/dx^k`. Since `[x^k, P_l] = i hbar delta_kl`,
//! the commutator of two such operators is the central scalar
//! `i hbar (a1 . b2 - b1 . a2)`, evaluated here in closed form.
//!
//! Magnetic translations `T(x) = exp[-(i/hbar) x^j p^T_j]` compose as
//! `T(x) T(y) = exp(i phi(x, y)) T(x + y)`. By Baker–Campbell–Hausdorff with
//! the central commutator `[p^T_j, p^T_k] = -i hbar (q/c) H_jk`,
//! `phi(x, y) = (q / (2 hbar c)) x^j H_jk y^k`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensors::{ensure_dim, field_from_gauge, FieldTensor, GaugeMatrix, PhysicalConstants};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct AffineOperator {
    pub scalar: Complex64,
    /// Coefficients of `x^k`.
    pub lin: Vec<Complex64>,
    /// Coefficients of `-i hbar d/dx^k`.
    pub deriv: Vec<Complex64>,
    pub hbar: f64,
}

impl AffineOperator {
    pub fn zero(n: usize, hbar: f64) -> Self {
        Self {
            scalar: Complex64::new(0.0, 0.0),
            lin: vec![Complex64::new(0.0, 0.0); n],
            deriv: vec![Complex64::new(0.0, 0.0); n],
            hbar,
        }
    }

    /// Multiplication by `x^k`.
    pub fn position(n: usize, k: usize, hbar: f64) -> Result<Self> {
        check_index(k, n)?;
        let mut op = Self::zero(n, hbar);
        op.lin[k] = Complex64::new(1.0, 0.0);
        Ok(op)
    }

    /// `-i hbar d/dx^k`.
    pub fn momentum(n: usize, k: usize, hbar: f64) -> Result<Self> {
        check_index(k, n)?;
        let mut op = Self::zero(n, hbar);
        op.deriv[k] = Complex64::new(1.0, 0.0);
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        ensure_dim(self.dim(), other.dim())?;
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            scalar: f(self.scalar, other.scalar),
            lin: self.lin.iter().zip(&other.lin).map(|(a, b)| f(*a, *b)).collect(),
            deriv: self.deriv.iter().zip(&other.deriv).map(|(a, b)| f(*a, *b)).collect(),
            hbar: self.hbar,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            scalar: self.scalar * factor,
            lin: self.lin.iter().map(|a| a * factor).collect(),
            deriv: self.deriv.iter().map(|b| b * factor).collect(),
            hbar: self.hbar,
        }
    }

    /// `[self, other]`, always a multiple of the identity.
    pub fn commutator(&self, other: &Self) -> Result<Complex64> {
        commutator(self, other)
    }
}

impl Add for &AffineOperator {
    type Output = AffineOperator;

    /// # Panics
    /// On mismatched dimension or `hbar`; use [`AffineOperator::checked_add`]
    /// to get an error instead.
    fn add(self, rhs: Self) -> AffineOperator {
        self.checked_add(rhs).expect("incompatible operators")
    }
}

impl Sub for &AffineOperator {
    type Output = AffineOperator;

    fn sub(self, rhs: Self) -> AffineOperator {
        self.checked_sub(rhs).expect("incompatible operators")
    }
}

impl Neg for &AffineOperator {
    type Output = AffineOperator;

    fn neg(self) -> AffineOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &AffineOperator {
    type Output = AffineOperator;

    fn mul(self, rhs: Complex64) -> AffineOperator {
        self.scale(rhs)
    }
}

fn check_index(j: usize, n: usize) -> Result<()> {
    if j < n {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: j, dim: n })
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `[O1, O2] = i hbar (a1 . b2 - b1 . a2)`.
pub fn commutator(o1: &AffineOperator, o2: &AffineOperator) -> Result<Complex64> {
    o1.compatible(o2)?;
    Ok(I * o1.hbar * (dot(&o1.lin, &o2.deriv) - dot(&o1.deriv, &o2.lin)))
}

/// Kinetic momentum `p_j = -i hbar d_j - (q/c) A_{kj} x^k` (index `j` is
/// zero-based).
pub fn canonical_momentum(
    a: &GaugeMatrix,
    constants: &PhysicalConstants,
    j: usize,
) -> Result<AffineOperator> {
    let n = a.dim();
    let mut op = AffineOperator::momentum(n, j, constants.hbar)?;
    let coupling = constants.coupling();
    for k in 0..n {
        op.lin[k] = Complex64::new(-coupling * a.matrix()[(k, j)], 0.0);
    }
    Ok(op)
}

/// Dual momentum `p^T_j = -i hbar d_j - (q/c) A_{jk} x^k`, equal to
/// `p_j - (q/c) H_{jk} x^k`.
pub fn dual_momentum(
    a: &GaugeMatrix,
    constants: &PhysicalConstants,
    j: usize,
) -> Result<AffineOperator> {
    let n = a.dim();
    let mut op = AffineOperator::momentum(n, j, constants.hbar)?;
    let coupling = constants.coupling();
    for k in 0..n {
        op.lin[k] = Complex64::new(-coupling * a.matrix()[(j, k)], 0.0);
    }
    Ok(op)
}

/// Composition phase of magnetic translations,
/// `phi(x, y) = (q / (2 hbar c)) x^j H_{jk} y^k`.
pub fn translation_phase(
    x: &DVector<f64>,
    y: &DVector<f64>,
    h: &FieldTensor,
    constants: &PhysicalConstants,
) -> Result<f64> {
    ensure_dim(h.dim(), x.len())?;
    ensure_dim(h.dim(), y.len())?;
    let factor = constants.charge / (2.0 * constants.hbar * constants.light_speed);
    Ok(factor * x.dot(&(h.matrix() * y)))
}

pub type Table = Vec<Vec<Complex64>>;

/// The three commutator tables of a gauge: `[p_j, p_k]`,
/// `[p^T_j, p^T_k]` and `[p_j, p^T_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorTables {
    pub momentum: Table,
    pub dual: Table,
    pub mixed: Table,
}

/// Max-abs deviations of each table from its expected value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorDeviations {
    /// From `i hbar (q/c) H_jk`.
    pub momentum: f64,
    /// From `-i hbar (q/c) H_jk`.
    pub dual: f64,
    /// From zero.
    pub mixed: f64,
}

impl CommutatorDeviations {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.dual).max(self.mixed)
    }
}

impl CommutatorTables {
    pub fn compute(a: &GaugeMatrix, constants: &PhysicalConstants) -> Result<Self> {
        let n = a.dim();
        let p = (0..n)
            .map(|j| canonical_momentum(a, constants, j))
            .collect::<Result<Vec<_>>>()?;
        let pt = (0..n)
            .map(|j| dual_momentum(a, constants, j))
            .collect::<Result<Vec<_>>>()?;
        let table = |left: &[AffineOperator], right: &[AffineOperator]| -> Result<Table> {
            left.iter()
                .map(|l| right.iter().map(|r| commutator(l, r)).collect())
                .collect()
        };
        Ok(Self {
            momentum: table(&p, &p)?,
            dual: table(&pt, &pt)?,
            mixed: table(&p, &pt)?,
        })
    }

    /// Deviations from the expected tables for the field of gauge `a`.
    pub fn deviations(&self, a: &GaugeMatrix, constants: &PhysicalConstants) -> CommutatorDeviations {
        let h = field_from_gauge(a);
        let unit = I * constants.hbar * constants.coupling();
        let dev = |table: &Table, sign: f64| {
            let mut worst: f64 = 0.0;
            for (j, row) in table.iter().enumerate() {
                for (k, value) in row.iter().enumerate() {
                    let expected = unit * (sign * h.matrix()[(j, k)]);
                    worst = worst.max((value - expected).norm());
                }
            }
            worst
        };
        CommutatorDeviations {
            momentum: dev(&self.momentum, 1.0),
            dual: dev(&self.dual, -1.0),
            mixed: dev(&self.mixed, 0.0),
        }
    }
}
