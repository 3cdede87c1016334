//! Deterministic fixtures shared by the benchmarks.

use ncyclo_core::{FieldTensor, ParticleState};
use nalgebra::DMatrix;

/// Small xorshift generator; benchmarks only need reproducible inputs.
pub struct Fixture(u64);

impl Fixture {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    fn next_unit(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    pub fn field(&mut self, n: usize) -> FieldTensor {
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in (j + 1)..n {
                let v = self.next_unit();
                h[(j, k)] = v;
                h[(k, j)] = -v;
            }
        }
        FieldTensor::new(h).expect("antisymmetric by construction")
    }

    pub fn state(&mut self, n: usize) -> ParticleState {
        let x = (0..n).map(|_| self.next_unit()).collect();
        let p = (0..n).map(|_| self.next_unit()).collect();
        ParticleState::new(x, p).expect("finite")
    }
}
