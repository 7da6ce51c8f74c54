//! Seeded generators for test functionals and states.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cumulants::Functional;
use crate::fock::OperatorData;
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::meixner::JacobiParams;
use crate::scalar::{q, Rational};

/// The generator used throughout; fixed algorithm so seeds are reproducible.
pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p / r` with `|p| <= 4` and `1 <= r <= 4`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    q(rng.gen_range(-4..=4), rng.gen_range(1..=4))
}

/// A unital functional with independent small rational moments; usually
/// not positive.
pub fn random_functional<R: Rng>(rng: &mut R, d: usize, order: usize) -> Functional<Rational> {
    Functional::from_fn(d, order, |_| random_rational(rng))
}

/// Jacobi parameters with `levels` entries each, `gamma_k > 0`.
pub fn random_jacobi<R: Rng>(rng: &mut R, levels: usize) -> JacobiParams<Rational> {
    JacobiParams {
        beta: (0..levels).map(|_| random_rational(rng)).collect(),
        gamma: (0..levels).map(|_| q(rng.gen_range(1..=4), rng.gen_range(1..=3))).collect(),
    }
}

/// Symmetric `dim × dim` matrix with small rational entries.
pub fn random_symmetric<R: Rng>(rng: &mut R, dim: usize) -> DenseMatrix<Rational> {
    let mut m = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v = random_rational(rng);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

/// State data `(K, e_1, K_i)` with random symmetric `K_i`; its vector state
/// is a genuine state.
pub fn random_state_data<R: Rng>(rng: &mut R, d: usize, dim: usize) -> OperatorData<Rational> {
    let xi = (0..dim).map(|a| q((a == 0) as i64, 1)).collect();
    let ops: Vec<_> = (0..d).map(|_| random_symmetric(rng, dim)).collect();
    OperatorData::state(xi, &ops).expect("well-formed")
}

/// Cumulant data `(H, ζ_i, H_i, λ_i)` with random entries; the encoded
/// functional is conditionally positive, so it is the free cumulant
/// functional of a freely infinitely divisible state.
pub fn random_cumulant_data<R: Rng>(rng: &mut R, d: usize, dim: usize) -> OperatorData<Rational> {
    let vectors = (0..d).map(|_| (0..dim).map(|_| random_rational(rng)).collect()).collect();
    let ops = (0..d).map(|_| SparseMatrix::from_dense(&random_symmetric(rng, dim))).collect();
    let scalars = (0..d).map(|_| random_rational(rng)).collect();
    OperatorData::new(vectors, ops, scalars).expect("well-formed")
}
