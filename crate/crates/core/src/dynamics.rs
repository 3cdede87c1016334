//! Classical equations of motion in a constant field.
//!
//! With `G = g^{-1}` the kinetic momentum and position obey
//! `dp/dt = (q/(m c)) H G p` and `dx/dt = G p / m`. The dual momentum
//! `p^T = p - (q/c) H x` is an integral of motion.

use nalgebra::{DMatrix, DVector};

use crate::canonical::{to_canonical, CanonicalCoords, CanonicalForm};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::tensors::{ensure_dim, FieldTensor, MetricTensor, PhysicalConstants};

/// Distance between `g` and `gamma` below which the in-plane geometry of
/// the canonical blocks is physically meaningful.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    /// Contravariant position `x^k`.
    pub x: DVector<f64>,
    /// Covariant kinetic momentum `p_j`.
    pub p: DVector<f64>,
    pub t: f64,
}

impl ParticleState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        Self::at_time(DVector::from_vec(x), DVector::from_vec(p), 0.0)
    }

    pub fn at_time(x: DVector<f64>, p: DVector<f64>, t: f64) -> Result<Self> {
        ensure_dim(x.len(), p.len())?;
        if x.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if !(x.iter().chain(p.iter()).all(|v| v.is_finite()) && t.is_finite()) {
            return Err(Error::NonFinite("particle state"));
        }
        Ok(Self { x, p, t })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// `K = (q/(m c)) H G`, so that `dp/dt = K p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsMatrix(DMatrix<f64>);

impl DynamicsMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

pub fn dynamics_matrix(
    h: &FieldTensor,
    g: &MetricTensor,
    constants: &PhysicalConstants,
) -> Result<DynamicsMatrix> {
    ensure_dim(h.dim(), g.dim())?;
    Ok(DynamicsMatrix(
        h.matrix() * g.contravariant() * constants.gyro_ratio(),
    ))
}

/// Exact one-step propagator for a fixed time step.
///
/// `p(t + dt) = exp(K dt) p(t)` and `x(t + dt) = x(t) + G Phi(dt) p(t) / m`
/// with `Phi(dt) = int_0^dt exp(s K) ds`, read off the upper-right block of
/// `exp([[K, I], [0, 0]] dt)`. No inverse of `K` is needed, so free
/// directions (singular `K`) are handled uniformly.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    momentum_map: DMatrix<f64>,
    drift_map: DMatrix<f64>,
    dt: f64,
}

impl ExactPropagator {
    pub fn new(
        k: &DynamicsMatrix,
        g: &MetricTensor,
        constants: &PhysicalConstants,
        dt: f64,
    ) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidStep(format!("dt = {dt}")));
        }
        let n = k.dim();
        ensure_dim(n, g.dim())?;
        let mut augmented = DMatrix::zeros(2 * n, 2 * n);
        augmented.view_mut((0, 0), (n, n)).copy_from(&(k.matrix() * dt));
        augmented
            .view_mut((0, n), (n, n))
            .copy_from(&(DMatrix::<f64>::identity(n, n) * dt));
        let e = expm(&augmented);
        let momentum_map = e.view((0, 0), (n, n)).into_owned();
        let phi = e.view((0, n), (n, n)).into_owned();
        let drift_map = g.contravariant() * phi / constants.mass;
        Ok(Self {
            momentum_map,
            drift_map,
            dt,
        })
    }

    pub fn step(&self, state: &ParticleState) -> Result<ParticleState> {
        ensure_dim(self.momentum_map.nrows(), state.dim())?;
        Ok(ParticleState {
            x: &state.x + &self.drift_map * &state.p,
            p: &self.momentum_map * &state.p,
            t: state.t + self.dt,
        })
    }

    /// `steps` applications, including the initial state in the output.
    pub fn trajectory(&self, state: &ParticleState, steps: usize) -> Result<Vec<ParticleState>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(state.clone());
        for _ in 0..steps {
            let next = self.step(out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Advances `state` by `dt` using the closed-form solution.
pub fn evolve_exact(
    state: &ParticleState,
    k: &DynamicsMatrix,
    g: &MetricTensor,
    constants: &PhysicalConstants,
    dt: f64,
) -> Result<ParticleState> {
    ExactPropagator::new(k, g, constants, dt)?.step(state)
}

/// Classic fourth-order Runge–Kutta on `(x, p)`. Returns `steps + 1` samples.
pub fn evolve_rk4(
    state: &ParticleState,
    k: &DynamicsMatrix,
    g: &MetricTensor,
    constants: &PhysicalConstants,
    dt: f64,
    steps: usize,
) -> Result<Vec<ParticleState>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    if steps == 0 {
        return Err(Error::InvalidStep("steps must be at least 1".into()));
    }
    let n = k.dim();
    ensure_dim(n, g.dim())?;
    ensure_dim(n, state.dim())?;
    let k = k.matrix();
    let velocity = g.contravariant() / constants.mass;
    let rhs = |p: &DVector<f64>| (&velocity * p, k * p);

    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.clone());
    let (mut x, mut p) = (state.x.clone(), state.p.clone());
    for i in 1..=steps {
        let (kx1, kp1) = rhs(&p);
        let (kx2, kp2) = rhs(&(&p + &kp1 * (0.5 * dt)));
        let (kx3, kp3) = rhs(&(&p + &kp2 * (0.5 * dt)));
        let (kx4, kp4) = rhs(&(&p + &kp3 * dt));
        x += (kx1 + kx2 * 2.0 + kx3 * 2.0 + kx4) * (dt / 6.0);
        p += (kp1 + kp2 * 2.0 + kp3 * 2.0 + kp4) * (dt / 6.0);
        out.push(ParticleState {
            x: x.clone(),
            p: p.clone(),
            t: state.t + i as f64 * dt,
        });
    }
    Ok(out)
}

/// `p^T_j = p_j - (q/c) H_{jk} x^k`.
pub fn dual_momentum_value(
    state: &ParticleState,
    h: &FieldTensor,
    constants: &PhysicalConstants,
) -> Result<DVector<f64>> {
    ensure_dim(h.dim(), state.dim())?;
    Ok(&state.p - h.matrix() * &state.x * constants.coupling())
}

/// `g^{jk} p_j p_k / (2 m)`.
pub fn kinetic_energy(
    state: &ParticleState,
    g: &MetricTensor,
    constants: &PhysicalConstants,
) -> Result<f64> {
    ensure_dim(g.dim(), state.dim())?;
    Ok(state.p.dot(&g.raise(&state.p)) / (2.0 * constants.mass))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDecomposition {
    /// Orbit-center pair per block, `(pi^T_{2l}, -pi^T_{2l-1}) / chi_l`.
    pub centers: Vec<[f64; 2]>,
    /// Relative-coordinate pair per block, `(-pi_{2l}, pi_{2l-1}) / chi_l`.
    pub relatives: Vec<[f64; 2]>,
    /// Canonical-basis velocity along the free directions.
    pub free_velocity: DVector<f64>,
    /// `(pih_{2l-1}^2 + pih_{2l}^2) / 2m` with physical momenta `pih = B^T p`.
    pub block_energies: Vec<f64>,
    /// `m |free_velocity|^2 / 2`.
    pub free_energy: f64,
    pub coords: CanonicalCoords,
    /// True only when `g` and `gamma` agree, so that the blocks decouple.
    pub geometric_interpretation_valid: bool,
}

impl OrbitDecomposition {
    pub fn radii(&self) -> Vec<f64> {
        self.relatives.iter().map(|r| r[0].hypot(r[1])).collect()
    }

    /// Max-abs of `center + relative - (xi_{2l-1}, xi_{2l})` over blocks.
    pub fn split_residual(&self) -> f64 {
        self.centers
            .iter()
            .zip(&self.relatives)
            .enumerate()
            .map(|(l, (c, r))| {
                let a = (c[0] + r[0] - self.coords.xi[2 * l]).abs();
                let b = (c[1] + r[1] - self.coords.xi[2 * l + 1]).abs();
                a.max(b)
            })
            .fold(0.0, f64::max)
    }

    pub fn total_split_energy(&self) -> f64 {
        self.block_energies.iter().sum::<f64>() + self.free_energy
    }
}

/// Splits a state into orbit centers, relative coordinates and free motion.
///
/// The formulas are evaluated regardless of the metric; the result reports
/// whether `g` coincides with `gamma`, the only case where the blocks are
/// independent planar rotations.
pub fn orbit_decomposition(
    state: &ParticleState,
    form: &CanonicalForm,
    h: &FieldTensor,
    g: &MetricTensor,
    constants: &PhysicalConstants,
) -> Result<OrbitDecomposition> {
    let n = form.dim();
    ensure_dim(n, g.dim())?;
    let coords = to_canonical(form, state, h, constants)?;
    let physical = form.basis().tr_mul(&state.p);

    let mut centers = Vec::with_capacity(form.block_count());
    let mut relatives = Vec::with_capacity(form.block_count());
    let mut block_energies = Vec::with_capacity(form.block_count());
    for (l, &chi) in form.chis().iter().enumerate() {
        let (odd, even) = (2 * l, 2 * l + 1);
        centers.push([coords.pi_dual[even] / chi, -coords.pi_dual[odd] / chi]);
        relatives.push([-coords.pi[even] / chi, coords.pi[odd] / chi]);
        block_energies
            .push((physical[odd].powi(2) + physical[even].powi(2)) / (2.0 * constants.mass));
    }
    let first_free = 2 * form.block_count();
    let free_velocity = physical.rows(first_free, n - first_free) / constants.mass;
    let free_energy = 0.5 * constants.mass * free_velocity.norm_squared();

    Ok(OrbitDecomposition {
        centers,
        relatives,
        free_velocity,
        block_energies,
        free_energy,
        coords,
        geometric_interpretation_valid: form.gamma().distance_to(g) <= GEOMETRY_TOL,
    })
}

/// Least-squares slope of the unwrapped polar angle of `pairs` against
/// `times`. Returns `None` for fewer than two samples or a degenerate
/// (zero-radius) pair.
pub fn fit_angular_frequency(times: &[f64], pairs: &[[f64; 2]]) -> Option<f64> {
    if times.len() != pairs.len() || times.len() < 2 {
        return None;
    }
    if pairs.iter().any(|p| p[0].hypot(p[1]) == 0.0) {
        return None;
    }
    let mut angles = Vec::with_capacity(pairs.len());
    let mut previous = pairs[0][1].atan2(pairs[0][0]);
    angles.push(previous);
    let mut offset = 0.0;
    for p in &pairs[1..] {
        let raw = p[1].atan2(p[0]);
        let mut delta = raw + offset - previous;
        while delta > std::f64::consts::PI {
            offset -= std::f64::consts::TAU;
            delta -= std::f64::consts::TAU;
        }
        while delta < -std::f64::consts::PI {
            offset += std::f64::consts::TAU;
            delta += std::f64::consts::TAU;
        }
        previous = raw + offset;
        angles.push(previous);
    }
    let n = times.len() as f64;
    let mean_t = times.iter().sum::<f64>() / n;
    let mean_a = angles.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, a) in times.iter().zip(&angles) {
        sxy += (t - mean_t) * (a - mean_a);
        sxx += (t - mean_t).powi(2);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}
