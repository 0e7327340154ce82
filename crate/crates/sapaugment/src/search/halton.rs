//! Scrambled Halton sequence for search-space initialization.
//!
//! Per-dimension Cranley-Patterson rotation: u_d(i) = frac(h_d(i) + shift_d)
//! with h_d the radical inverse in the d-th prime base and shifts drawn once
//! from the seed. Rotation keeps the low-discrepancy structure and keeps
//! distinct indices distinct.

use rand::Rng;

use crate::seeding::stream;

pub struct ScrambledHalton {
    bases: Vec<u64>,
    shifts: Vec<f64>,
}

impl ScrambledHalton {
    pub fn new(dims: usize, seed: u64) -> Self {
        let bases = first_primes(dims);
        let shifts = (0..dims)
            .map(|d| stream(seed, &[0x4a17, d as u64]).random::<f64>())
            .collect();
        ScrambledHalton { bases, shifts }
    }

    /// Point `index` of the sequence, in the half-open unit cube. Index 0 of
    /// the raw sequence is the origin, so callers should start at 1.
    pub fn point(&self, index: u64) -> Vec<f64> {
        self.bases
            .iter()
            .zip(&self.shifts)
            .map(|(&base, &shift)| {
                let u = radical_inverse(index, base) + shift;
                u - u.floor()
            })
            .collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut scale = inv_base;
    let mut value = 0.0;
    while i > 0 {
        value += (i % base) as f64 * scale;
        i /= base;
        scale *= inv_base;
    }
    value
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes.iter().all(|&p| !candidate.is_multiple_of(p)) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}
