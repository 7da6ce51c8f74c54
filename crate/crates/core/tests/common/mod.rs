//! Shared helpers for the integration tests: brute-force partition
//! oracles, random inputs and a small outcome type.

#![allow(dead_code)]

use cfree_core::random::{random_functional, random_jacobi, TestRng};
use cfree_core::meixner::moments_from_jacobi;
use cfree_core::transforms::bercovici_pata;
use cfree_core::{q, Functional, Rational};
use rand::Rng;

/// Every set partition of `{1..n}` as a block-label vector (restricted
/// growth strings).
pub fn all_set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn grow(pos: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == labels.len() {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels[pos] = l;
            grow(pos + 1, max.max(l), labels, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    grow(1, 0, &mut labels, &mut out);
    out
}

/// No `a < b < c < d` with `a ~ c`, `b ~ d` in different blocks.
pub fn is_noncrossing(labels: &[usize]) -> bool {
    let n = labels.len();
    for a in 0..n {
        for b in a + 1..n {
            if labels[a] == labels[b] {
                continue;
            }
            for c in b + 1..n {
                if labels[c] != labels[a] {
                    continue;
                }
                if (c + 1..n).any(|d| labels[d] == labels[b]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Block lists (1-based, sorted) from a label vector, in canonical order.
pub fn blocks_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        blocks[l].push(i + 1);
    }
    blocks
}

pub fn catalan(n: usize) -> u64 {
    (0..n as u64).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

/// A state-like unital functional with small rational moments.
pub fn random_moments(rng: &mut TestRng, d: usize, order: usize) -> Functional<Rational> {
    random_functional(rng, d, order)
}

/// A one-variable state from random Jacobi parameters.
pub fn jacobi_state(rng: &mut TestRng, order: usize) -> Functional<Rational> {
    moments_from_jacobi(&random_jacobi(rng, order / 2 + 1), order).expect("enough levels")
}

/// `𝔅[σ]` for a random functional `σ`, so its free cumulants are arbitrary.
pub fn random_rho(rng: &mut TestRng, d: usize, order: usize) -> Functional<Rational> {
    bercovici_pata(&random_functional(rng, d, order))
}

/// A random rational vector with entries in `{-2, ..., 2} / {1, 2}`.
pub fn random_vector(rng: &mut TestRng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| q(rng.gen_range(-2..=2), rng.gen_range(1..=2))).collect()
}

/// Result of one acceptance criterion.
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}
