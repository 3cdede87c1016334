//! Test-only generators and independent oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ncyclo_core::{
    AffineOperator, Complex64, DMatrix, DVector, FieldTensor, GaugeMatrix, ParticleState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale))
}

pub fn random_integer_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i32) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-bound..=bound) as f64)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

pub fn random_field(rng: &mut ChaCha8Rng, n: usize) -> FieldTensor {
    let a = random_matrix(rng, n, 1.0);
    FieldTensor::new(&a - a.transpose()).unwrap()
}

pub fn random_gauge(rng: &mut ChaCha8Rng, n: usize) -> GaugeMatrix {
    GaugeMatrix::new(random_matrix(rng, n, 2.0)).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> ParticleState {
    ParticleState::at_time(random_vector(rng, n, 2.0), random_vector(rng, n, 2.0), 0.0).unwrap()
}

/// Random orthogonal matrix from the QR factor of a random matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    random_matrix(rng, n, 1.0).qr().q()
}

/// Positive imaginary parts of the eigenvalues of `h`, from nalgebra's
/// real Schur route, sorted descending with the zero cluster dropped.
pub fn eigen_oracle_chis(h: &DMatrix<f64>, cutoff: f64) -> Vec<f64> {
    let mut im: Vec<f64> = h
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im)
        .filter(|v| *v > cutoff)
        .collect();
    im.sort_by(|a, b| b.total_cmp(a));
    im
}

/// Multivariate polynomial with complex coefficients, keyed by exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub BTreeMap<Vec<u32>, Complex64>);

impl Poly {
    pub fn random_quadratic(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let mut terms = BTreeMap::new();
        let mut push = |e: Vec<u32>, rng: &mut ChaCha8Rng| {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            *terms.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        };
        push(vec![0; n], rng);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            push(e, rng);
            for k in j..n {
                let mut e = vec![0; n];
                e[j] += 1;
                e[k] += 1;
                push(e, rng);
            }
        }
        Poly(terms)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Complex64) {
        *self.0.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    fn scaled(&self, c: Complex64) -> Poly {
        Poly(self.0.iter().map(|(e, v)| (e.clone(), v * c)).collect())
    }

    fn times_coordinate(&self, k: usize) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(e, v)| {
                    let mut e = e.clone();
                    e[k] += 1;
                    (e, *v)
                })
                .collect(),
        )
    }

    fn derivative(&self, k: usize) -> Poly {
        let mut out = Poly(BTreeMap::new());
        for (e, v) in &self.0 {
            if e[k] > 0 {
                let mut d = e.clone();
                d[k] -= 1;
                out.add_term(d, v * e[k] as f64);
            }
        }
        out
    }

    fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, v) in &other.0 {
            out.add_term(e.clone(), *v);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Poly) -> f64 {
        let neg = other.scaled(Complex64::new(-1.0, 0.0));
        self.plus(&neg).0.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Applies `s + a_k x^k + b^k (-i hbar d_k)` by explicit differentiation.
    pub fn apply(&self, op: &AffineOperator) -> Poly {
        let minus_i_hbar = Complex64::new(0.0, -op.hbar);
        let mut out = self.scaled(op.scalar);
        for k in 0..op.dim() {
            out = out.plus(&self.times_coordinate(k).scaled(op.lin[k]));
            out = out.plus(&self.derivative(k).scaled(op.deriv[k] * minus_i_hbar));
        }
        out
    }

    pub fn commutator_applied(&self, o1: &AffineOperator, o2: &AffineOperator) -> Poly {
        let first = self.apply(o2).apply(o1);
        let second = self.apply(o1).apply(o2);
        first.plus(&second.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn times_scalar(&self, c: Complex64) -> Poly {
        self.scaled(c)
    }
}

pub fn random_affine(rng: &mut ChaCha8Rng, n: usize, hbar: f64) -> AffineOperator {
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    AffineOperator {
        scalar: c(),
        lin: (0..n).map(|_| c()).collect(),
        deriv: (0..n).map(|_| c()).collect(),
        hbar,
    }
}

/// Algebraic (Kåsa) circle fit: returns `(center, radius)`.
pub fn fit_circle(points: &[[f64; 2]]) -> ([f64; 2], f64) {
    // minimize sum (x^2 + y^2 + D x + E y + F)^2
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut atb = nalgebra::Vector3::<f64>::zeros();
    for p in points {
        let row = nalgebra::Vector3::new(p[0], p[1], 1.0);
        let rhs = -(p[0] * p[0] + p[1] * p[1]);
        ata += row * row.transpose();
        atb += row * rhs;
    }
    let sol = ata.lu().solve(&atb).expect("non-degenerate circle");
    let center = [-sol[0] / 2.0, -sol[1] / 2.0];
    let radius = (center[0].powi(2) + center[1].powi(2) - sol[2]).sqrt();
    (center, radius)
}

/// Independent RK4 on `(x, p)` written against the raw equations of motion
/// `dp/dt = (q/(m c)) H g^{-1} p`, `dx/dt = g^{-1} p / m`.
pub fn reference_rk4(
    h: &DMatrix<f64>,
    g_inv: &DMatrix<f64>,
    q_over_mc: f64,
    mass: f64,
    x0: &DVector<f64>,
    p0: &DVector<f64>,
    dt: f64,
    steps: usize,
) -> Vec<(DVector<f64>, DVector<f64>)> {
    let f = |p: &DVector<f64>| (g_inv * p / mass, h * (g_inv * p) * q_over_mc);
    let mut x = x0.clone();
    let mut p = p0.clone();
    let mut out = vec![(x.clone(), p.clone())];
    for _ in 0..steps {
        let (a1, b1) = f(&p);
        let (a2, b2) = f(&(&p + &b1 * (dt / 2.0)));
        let (a3, b3) = f(&(&p + &b2 * (dt / 2.0)));
        let (a4, b4) = f(&(&p + &b3 * dt));
        x += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (dt / 6.0);
        p += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (dt / 6.0);
        out.push((x.clone(), p.clone()));
    }
    out
}
