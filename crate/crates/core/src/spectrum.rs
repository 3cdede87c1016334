//! Cyclotron frequencies, Landau levels and spectrum classification.
//!
//! Each block Hamiltonian `(pi_{2l-1}^2 + pi_{2l}^2) / 2m` is a harmonic
//! oscillator because the two kinetic momenta have a central commutator
//! `i hbar (q/c) chi_l`. Its levels are `hbar omega_l (n_l + 1/2)` with
//! `omega_l = |q| chi_l / (m c)`. Free directions contribute a continuum.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::tensors::{MetricTensor, PhysicalConstants};

/// `omega_l = |q| chi_l / (m c)`, descending.
pub fn cyclotron_frequencies(form: &CanonicalForm, constants: &PhysicalConstants) -> Vec<f64> {
    let factor = constants.charge.abs() / (constants.mass * constants.light_speed);
    form.chis().iter().map(|chi| factor * chi).collect()
}

/// `sum_l hbar omega_l (n_l + 1/2)`.
pub fn landau_level(
    form: &CanonicalForm,
    constants: &PhysicalConstants,
    quantum_numbers: &[u64],
) -> Result<f64> {
    level_energy(&cyclotron_frequencies(form, constants), constants.hbar, quantum_numbers)
}

fn level_energy(omegas: &[f64], hbar: f64, quantum_numbers: &[u64]) -> Result<f64> {
    if omegas.len() != quantum_numbers.len() {
        return Err(Error::QuantumNumberCount {
            expected: omegas.len(),
            found: quantum_numbers.len(),
        });
    }
    Ok(omegas
        .iter()
        .zip(quantum_numbers)
        .map(|(w, &n)| hbar * w * (n as f64 + 0.5))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discreteness {
    /// Every direction is a cyclotron plane.
    Discrete,
    /// At least one free direction.
    Continuous,
    /// Indefinite metric; the classification does not apply.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub omegas: Vec<f64>,
    pub block_count: usize,
    pub free_count: usize,
    pub discreteness: Discreteness,
    pub ground_energy: f64,
    pub hbar: f64,
}

impl SpectrumReport {
    /// `Some(free_count == 0)` for a definite metric, `None` otherwise.
    pub fn fully_discrete(&self) -> Option<bool> {
        match self.discreteness {
            Discreteness::Discrete => Some(true),
            Discreteness::Continuous => Some(false),
            Discreteness::NotApplicable => None,
        }
    }

    /// The `count` lowest oscillator levels in ascending energy order; ties
    /// are ordered lexicographically by quantum numbers.
    pub fn lowest_levels(&self, count: usize) -> Vec<Level> {
        lowest_levels(&self.omegas, self.hbar, count)
    }
}

pub fn classify_spectrum(
    form: &CanonicalForm,
    constants: &PhysicalConstants,
    metric: &MetricTensor,
) -> SpectrumReport {
    let omegas = cyclotron_frequencies(form, constants);
    let free_count = form.free_dims();
    let discreteness = if !metric.is_positive_definite() {
        Discreteness::NotApplicable
    } else if free_count == 0 {
        Discreteness::Discrete
    } else {
        Discreteness::Continuous
    };
    let ground_energy = omegas.iter().map(|w| 0.5 * constants.hbar * w).sum();
    SpectrumReport {
        block_count: omegas.len(),
        omegas,
        free_count,
        discreteness,
        ground_energy,
        hbar: constants.hbar,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub quantum_numbers: Vec<u64>,
}

#[derive(PartialEq)]
struct Candidate(f64, Vec<u64>);

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

/// Best-first enumeration over quantum-number tuples.
pub fn lowest_levels(omegas: &[f64], hbar: f64, count: usize) -> Vec<Level> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let start = vec![0u64; omegas.len()];
    let energy = |q: &[u64]| level_energy(omegas, hbar, q).expect("length matches");
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    heap.push(Reverse(Candidate(energy(&start), start.clone())));
    seen.insert(start);
    while let Some(Reverse(Candidate(e, q))) = heap.pop() {
        for l in 0..q.len() {
            let mut next = q.clone();
            next[l] += 1;
            if seen.insert(next.clone()) {
                heap.push(Reverse(Candidate(energy(&next), next)));
            }
        }
        out.push(Level {
            energy: e,
            quantum_numbers: q,
        });
        if out.len() == count {
            break;
        }
    }
    out
}
