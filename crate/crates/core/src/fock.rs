//! Finite-dimensional Fock-space models. Operator data `(K, ξ, K_i)` or
//! `(H, ζ_i, H_i, λ_i)` is assembled into creation, annihilation, gauge and
//! scalar operators on a Boolean or truncated full Fock space, and vacuum
//! expectations reproduce moments.
//!
//! Truncation: a word of length `n` that starts and ends at the vacuum
//! never climbs above tensor level `⌈n/2⌉`, so depth `L >= N` is always
//! enough for exact moments through degree `N`.

use nalgebra::DMatrix;

use crate::cumulants::{boolean_from_moments, moments_from_free, CumulantKind, CumulantSeries, Functional};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix, SparseMatrix};
use crate::scalar::Scalar;
use crate::series::{NcSeries, Word};
use crate::transforms::{bercovici_pata, phi_map};

/// Default cap on the dimension of any assembled space.
pub const DEFAULT_DIM_BOUND: usize = 1 << 20;

/// Relative eigenvalue threshold below which a Gram direction counts as kernel.
pub const GNS_KERNEL_EPS: f64 = 1e-10;

/// Base data of an operator model: a space of dimension `dim`, one shared
/// vector or one vector per variable, one symmetric operator and one scalar
/// per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorData<T> {
    pub dim: usize,
    pub vectors: Vec<Vec<T>>,
    pub ops: Vec<SparseMatrix<T>>,
    pub scalars: Vec<T>,
}

impl<T: Scalar> OperatorData<T> {
    /// Validates shapes and symmetry.
    pub fn new(vectors: Vec<Vec<T>>, ops: Vec<SparseMatrix<T>>, scalars: Vec<T>) -> Result<Self> {
        let d = ops.len();
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let dim = ops[0].rows();
        if ops.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::Dimension("operators must share one square shape".into()));
        }
        if !(vectors.len() == 1 || vectors.len() == d) || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension(format!("expected 1 or {d} vectors of length {dim}")));
        }
        if scalars.len() != d {
            return Err(Error::Dimension(format!("expected {d} scalars, got {}", scalars.len())));
        }
        let tol = if T::EXACT { 0.0 } else { 1e-12 };
        if ops.iter().any(|m| m.asymmetry() > tol) {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { dim, vectors, ops, scalars })
    }

    /// Data from dense matrices.
    pub fn from_dense(vectors: Vec<Vec<T>>, ops: &[DenseMatrix<T>], scalars: Vec<T>) -> Result<Self> {
        Self::new(vectors, ops.iter().map(SparseMatrix::from_dense).collect(), scalars)
    }

    /// State data `(K, ξ, K_i)`: one vector, zero scalars.
    pub fn state(xi: Vec<T>, ops: &[DenseMatrix<T>]) -> Result<Self> {
        let scalars = vec![T::zero(); ops.len()];
        Self::from_dense(vec![xi], ops, scalars)
    }

    pub fn d(&self) -> usize {
        self.ops.len()
    }

    /// Vector attached to variable `i` (0-based).
    pub fn vector(&self, i: usize) -> &[T] {
        &self.vectors[i.min(self.vectors.len() - 1)]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> OperatorData<U> {
        OperatorData {
            dim: self.dim,
            vectors: self.vectors.iter().map(|v| v.iter().map(&f).collect()).collect(),
            ops: self.ops.iter().map(|m| m.map(&f)).collect(),
            scalars: self.scalars.iter().map(&f).collect(),
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.mul_ref(y))
}

fn kron_vec<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.mul_ref(y))).collect()
}

/// Moments `<v, X_{u_1} ... X_{u_n} v>` of a unit vector `v` for all words
/// of degree `<= order`. Each word costs one sparse product, reusing the
/// vector of its suffix.
pub fn vector_moments<T: Scalar>(ops: &[SparseMatrix<T>], v: &[T], order: usize) -> Functional<T> {
    let d = ops.len();
    let mut m = NcSeries::zero(d, order);
    let mut letters = Vec::with_capacity(order);
    fn walk<T: Scalar>(ops: &[SparseMatrix<T>], v: &[T], cur: &[T], letters: &mut Vec<usize>, order: usize, m: &mut NcSeries<T>) {
        if letters.len() == order {
            return;
        }
        for (i, op) in ops.iter().enumerate() {
            let next = op.mul_vec(cur);
            letters.insert(0, i + 1);
            m.set(&Word::new(letters.clone()), dot(v, &next)).expect("degree within order");
            walk(ops, v, &next, letters, order, m);
            letters.remove(0);
        }
    }
    walk(ops, v, v, &mut letters, order, &mut m);
    m.set(&Word::empty(), T::one()).expect("empty word");
    Functional::new(m).expect("unital by construction")
}

/// The state `<ξ, K_u ξ>` of state data.
pub fn state_moments<T: Scalar>(data: &OperatorData<T>, order: usize) -> Functional<T> {
    vector_moments(&data.ops, data.vector(0), order)
}

/// The functional `μ[x_i] = λ_i`, `μ[x_i x_u x_j] = <ζ_i, H_u ζ_j>` encoded by
/// cumulant data.
pub fn cumulant_series<T: Scalar>(data: &OperatorData<T>, order: usize) -> NcSeries<T> {
    let d = data.d();
    NcSeries::from_fn(d, order, |w| match w.letters() {
        [] => T::zero(),
        [i] => data.scalars[i - 1].clone(),
        [i, mid @ .., j] => {
            let mut v = data.vector(j - 1).to_vec();
            for &l in mid.iter().rev() {
                v = data.ops[l - 1].mul_vec(&v);
            }
            dot(data.vector(i - 1), &v)
        }
    })
}

/// Which Fock space a model lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FockKind {
    /// `CΩ ⊕ K`.
    Boolean,
    /// `CΩ ⊕ H ⊕ ... ⊕ H^{⊗L}`.
    Full,
}

/// Assembled operators on a Fock space, with the vacuum at index `vacuum`.
#[derive(Clone, Debug)]
pub struct FockModel<T> {
    pub kind: FockKind,
    /// Truncation level `L` of a full model; `1` for Boolean models.
    pub depth: usize,
    pub dim: usize,
    pub ops: Vec<SparseMatrix<T>>,
    pub vacuum: usize,
}

impl<T: Scalar> FockModel<T> {
    /// Vacuum moments through degree `order`.
    pub fn vacuum_moments(&self, order: usize) -> Result<Functional<T>> {
        if self.kind == FockKind::Full && self.depth < order {
            return Err(Error::DepthTooSmall { depth: self.depth, order });
        }
        let mut omega = vec![T::zero(); self.dim];
        omega[self.vacuum] = T::one();
        Ok(vector_moments(&self.ops, &omega, order))
    }

    /// Largest `|A - A^T|` entry over all operators.
    pub fn asymmetry(&self) -> f64 {
        self.ops.iter().map(SparseMatrix::asymmetry).fold(0.0, f64::max)
    }
}

/// `a^+_ε + a^-_ε + S_i + α_i P_Ω` on `CΩ ⊕ K`, with `Ω` at index 0.
pub fn build_boolean_model<T: Scalar>(data: &OperatorData<T>) -> FockModel<T> {
    let dim = data.dim + 1;
    let ops = (0..data.d())
        .map(|i| {
            let mut m = SparseMatrix::zeros(dim, dim);
            m.add(0, 0, data.scalars[i].clone());
            for (a, e) in data.vector(i).iter().enumerate() {
                m.add(a + 1, 0, e.clone());
                m.add(0, a + 1, e.clone());
            }
            for (a, b, v) in data.ops[i].entries() {
                m.add(a + 1, b + 1, v.clone());
            }
            m
        })
        .collect();
    FockModel { kind: FockKind::Boolean, depth: 1, dim, ops, vacuum: 0 }
}

/// Dimension of `CΩ ⊕ H ⊕ ... ⊕ H^{⊗L}`, or `None` on overflow.
fn full_dim(h: usize, depth: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut level: usize = 1;
    for _ in 0..=depth {
        total = total.checked_add(level)?;
        level = level.checked_mul(h)?;
    }
    Some(total)
}

/// `a^+_ζ + a^-_ζ + p(G) + λ I` on the full Fock space of dimension `h`
/// truncated at `depth`. Level `l` starts at `Σ_{j<l} h^j`; the first tensor
/// factor is the most significant digit.
fn full_fock_operator<T: Scalar>(h: usize, depth: usize, zeta: &[T], gauge: &SparseMatrix<T>, lambda: &T) -> SparseMatrix<T> {
    let dim = full_dim(h, depth).expect("checked by caller");
    let mut m = SparseMatrix::scaled_identity(dim, lambda.clone());
    let mut start = 0;
    let mut width = 1;
    for level in 0..=depth {
        let next_start = start + width;
        for r in 0..width {
            if level < depth {
                for (b, z) in zeta.iter().enumerate() {
                    if z.is_zero() {
                        continue;
                    }
                    let target = next_start + b * width + r;
                    m.add(target, start + r, z.clone());
                    m.add(start + r, target, z.clone());
                }
            }
        }
        if level >= 1 {
            let tail = width / h;
            for b in 0..h {
                for rest in 0..tail {
                    for b2 in 0..h {
                        let g = gauge.get(b2, b);
                        if !g.is_zero() {
                            m.add(start + b2 * tail + rest, start + b * tail + rest, g);
                        }
                    }
                }
            }
        }
        start = next_start;
        width *= h;
    }
    m
}

/// Full Fock model truncated at `depth`, with [`DEFAULT_DIM_BOUND`].
pub fn build_full_model<T: Scalar>(data: &OperatorData<T>, depth: usize) -> Result<FockModel<T>> {
    build_full_model_bounded(data, depth, DEFAULT_DIM_BOUND)
}

/// Full Fock model truncated at `depth`, rejecting spaces above `bound`.
pub fn build_full_model_bounded<T: Scalar>(data: &OperatorData<T>, depth: usize, bound: usize) -> Result<FockModel<T>> {
    let dim = full_dim(data.dim, depth).filter(|&n| n <= bound).ok_or(Error::DimensionBound {
        dim: full_dim(data.dim, depth).unwrap_or(usize::MAX),
        bound,
    })?;
    let ops = (0..data.d())
        .map(|i| full_fock_operator(data.dim, depth, data.vector(i), &data.ops[i], &data.scalars[i]))
        .collect();
    Ok(FockModel { kind: FockKind::Full, depth, dim, ops, vacuum: 0 })
}

/// Projection onto the span of `xi`, normalized by `|xi|^2`.
fn projection<T: Scalar>(xi: &[T]) -> SparseMatrix<T> {
    let norm = dot(xi, xi);
    let support: Vec<(usize, &T)> = xi.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
    let mut p = SparseMatrix::zeros(xi.len(), xi.len());
    for &(a, x) in &support {
        for &(b, y) in &support {
            p.add(a, b, x.mul_ref(y) / norm.clone());
        }
    }
    p
}

/// Data `(K ⊗ H, ξ ⊗ ζ_i, K_i ⊗ I + P_ξ ⊗ H_i, λ_i)` combining state data of
/// `ψ` with cumulant data of `μ`. Its cumulant series is the Boolean
/// cumulant series of `Φ[ρ, ψ]`, where `μ` is the free cumulant functional
/// of `ρ`.
pub fn tensor_eta_model<T: Scalar>(psi: &OperatorData<T>, mu: &OperatorData<T>) -> Result<OperatorData<T>> {
    tensor_eta_model_bounded(psi, mu, DEFAULT_DIM_BOUND)
}

pub fn tensor_eta_model_bounded<T: Scalar>(psi: &OperatorData<T>, mu: &OperatorData<T>, bound: usize) -> Result<OperatorData<T>> {
    if psi.d() != mu.d() {
        return Err(Error::AlphabetMismatch { left: psi.d(), right: mu.d() });
    }
    let dim = psi.dim.checked_mul(mu.dim).filter(|&n| n <= bound).ok_or(Error::DimensionBound {
        dim: psi.dim.saturating_mul(mu.dim),
        bound,
    })?;
    let xi = psi.vector(0);
    let p = projection(xi);
    let id_h = SparseMatrix::scaled_identity(mu.dim, T::one());
    let ops = (0..psi.d()).map(|i| psi.ops[i].kron(&id_h).plus(&p.kron(&mu.ops[i]))).collect();
    let vectors = (0..mu.vectors.len()).map(|i| kron_vec(xi, mu.vector(i))).collect();
    let out = OperatorData { dim, vectors, ops, scalars: mu.scalars.clone() };
    Ok(out)
}

/// State data on `F_L(K ⊗ H) ⊗ K` whose vector state at `Ω ⊗ ξ` is `ψ ⊞ ρ`.
///
/// Each variable acts by the full Fock operator of the tensor data tensored
/// with `I_K`, plus `K_i` on the trailing factor at level zero.
pub fn free_sum_model<T: Scalar>(psi: &OperatorData<T>, mu: &OperatorData<T>, depth: usize) -> Result<OperatorData<T>> {
    free_sum_model_bounded(psi, mu, depth, DEFAULT_DIM_BOUND)
}

pub fn free_sum_model_bounded<T: Scalar>(
    psi: &OperatorData<T>,
    mu: &OperatorData<T>,
    depth: usize,
    bound: usize,
) -> Result<OperatorData<T>> {
    let tensor = tensor_eta_model_bounded(psi, mu, bound)?;
    let fock = build_full_model_bounded(&tensor, depth, bound)?;
    let dim = fock.dim.checked_mul(psi.dim).filter(|&n| n <= bound).ok_or(Error::DimensionBound {
        dim: fock.dim.saturating_mul(psi.dim),
        bound,
    })?;
    let id_k = SparseMatrix::scaled_identity(psi.dim, T::one());
    let mut p_omega = SparseMatrix::zeros(fock.dim, fock.dim);
    p_omega.add(0, 0, T::one());
    let ops = fock.ops.iter().zip(&psi.ops).map(|(f, k)| f.kron(&id_k).plus(&p_omega.kron(k))).collect();
    let mut xi = vec![T::zero(); dim];
    xi[..psi.dim].clone_from_slice(psi.vector(0));
    Ok(OperatorData { dim, vectors: vec![xi], ops, scalars: vec![T::zero(); psi.d()] })
}

/// Outcome of [`evolution_operator_check`].
#[derive(Clone, Debug)]
pub struct EvolutionOperatorReport {
    /// Dimension of the full Fock space carrying `𝔅[Φ[ρ, ψ]]`.
    pub dim_a: usize,
    /// Dimension of the Boolean Fock space carrying `Φ[ρ, ψ ⊞ ρ]`.
    pub dim_b: usize,
    /// Largest moment difference between the two operator families.
    pub sides: f64,
    /// Largest difference between the first family and the series pipeline.
    pub a_vs_series: f64,
    /// Largest difference between the second family and the series pipeline.
    pub b_vs_series: f64,
    /// Largest difference between the free-sum model and `ψ ⊞ ρ`.
    pub free_sum_vs_series: f64,
}

impl EvolutionOperatorReport {
    pub fn max_residual(&self) -> f64 {
        self.sides.max(self.a_vs_series).max(self.b_vs_series).max(self.free_sum_vs_series)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

/// Builds `𝔅[Φ[ρ, ψ]]` as a full Fock model of the tensor data and
/// `Φ[ρ, ψ ⊞ ρ]` as a Boolean model over the free-sum model, compares their
/// vacuum moments through degree `order`, and checks both against the
/// series pipeline. `ψ` comes from `psi` state data, `ρ` from `mu` cumulant
/// data. With rational data every residual is exactly zero when the
/// identity holds.
pub fn evolution_operator_check<T: Scalar>(
    psi: &OperatorData<T>,
    mu: &OperatorData<T>,
    order: usize,
    depth: usize,
) -> Result<EvolutionOperatorReport> {
    if depth < order {
        return Err(Error::DepthTooSmall { depth, order });
    }
    let side_a = build_full_model(&tensor_eta_model(psi, mu)?, depth)?;
    let moments_a = side_a.vacuum_moments(order)?;

    let sum = free_sum_model(psi, mu, depth)?;
    let side_b = build_boolean_model(&tensor_eta_model(&sum, mu)?);
    let moments_b = side_b.vacuum_moments(order)?;

    let psi_f = state_moments(psi, order);
    let rho = moments_from_free(&CumulantSeries::new(CumulantKind::Free, cumulant_series(mu, order))?);
    let expected = bercovici_pata(&phi_map(&rho, &psi_f)?);
    let sum_expected = crate::transforms::free_convolve(&psi_f, &rho)?;

    Ok(EvolutionOperatorReport {
        dim_a: side_a.dim,
        dim_b: side_b.dim,
        sides: moments_a.moments().max_abs_diff(moments_b.moments()),
        a_vs_series: moments_a.moments().max_abs_diff(expected.moments()),
        b_vs_series: moments_b.moments().max_abs_diff(expected.moments()),
        free_sum_vs_series: state_moments(&sum, order).moments().max_abs_diff(sum_expected.moments()),
    })
}

/// Orthonormal basis of the Gram quotient: columns `v_m / sqrt(λ_m)` over
/// the retained eigenvalues.
fn gram_basis(gram: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = symmetric_eigen(gram);
    let top = values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..values.len()).filter(|&m| top > 0.0 && values[m] > GNS_KERNEL_EPS * top).collect();
    DMatrix::from_fn(gram.nrows(), keep.len(), |u, c| vectors[(u, keep[c])] / values[keep[c]].sqrt())
}

fn check_gram_psd(gram: &DMatrix<f64>, k: usize) -> Result<()> {
    let (values, _) = symmetric_eigen(gram);
    let top = values.iter().copied().fold(0.0, f64::max);
    if values.iter().any(|&l| l < -crate::meixner::DEFAULT_PSD_EPS * top.max(1e-300)) {
        return Err(Error::NotPositive { level: k });
    }
    Ok(())
}

/// Compresses `<e_m, x_i e_n>` into dense symmetric matrices, one per letter.
fn compressed_ops(words: &[Word], basis: &DMatrix<f64>, d: usize, pairing: impl Fn(&Word) -> f64) -> Vec<SparseMatrix<f64>> {
    (1..=d)
        .map(|i| {
            let x = DMatrix::from_fn(words.len(), words.len(), |u, v| {
                pairing(&words[u].reversed().concat(&Word::new(vec![i])).concat(&words[v]))
            });
            let c = basis.transpose() * x * basis;
            let sym = DenseMatrix::from_fn(c.nrows(), c.ncols(), |a, b| 0.5 * (c[(a, b)] + c[(b, a)]));
            SparseMatrix::from_dense(&sym)
        })
        .collect()
}

/// Finite GNS model of `f` on polynomials of degree `<= k`: `ξ` is the image
/// of `1` and `K_i` the compression of multiplication by `x_i`. The vector
/// state reproduces `f` on all words of degree `<= 2k + 1`, which requires
/// `f` to be known through that degree.
pub fn gns_from_functional<T: Scalar>(f: &Functional<T>, k: usize) -> Result<OperatorData<f64>> {
    if 2 * k + 1 > f.order() {
        return Err(Error::LevelTooDeep { level: k, needed: 2 * k + 1, order: f.order() });
    }
    let f = f.cast::<f64>();
    let words: Vec<Word> = Word::all(f.d(), k).collect();
    let gram = DMatrix::from_fn(words.len(), words.len(), |u, v| f.moment(&words[u].reversed().concat(&words[v])));
    check_gram_psd(&gram, k)?;
    let basis = gram_basis(&gram);
    let xi: Vec<f64> = (0..basis.ncols()).map(|m| (0..words.len()).map(|u| basis[(u, m)] * gram[(u, 0)]).sum()).collect();
    let ops = compressed_ops(&words, &basis, f.d(), |w| f.moment(w));
    OperatorData::new(vec![xi], ops, vec![0.0; f.d()])
}

/// Conditional GNS model `(H, ζ_i, H_i, λ_i)` of a functional `μ` without
/// constant term, positive on polynomials of degree `1..=k` without
/// constant term. Reproduces `μ[x_i x_u x_j] = <ζ_i, H_u ζ_j>` for
/// `|u| <= 2k - 1`, which requires `μ` through degree `2k + 1`.
pub fn gns_conditional<T: Scalar>(mu: &NcSeries<T>, k: usize) -> Result<OperatorData<f64>> {
    if k == 0 || 2 * k + 1 > mu.order() {
        return Err(Error::LevelTooDeep { level: k, needed: 2 * k + 1, order: mu.order() });
    }
    let mu = mu.map(|x| x.to_f64_lossy());
    let words: Vec<Word> = Word::all(mu.d(), k).filter(|w| !w.is_empty()).collect();
    let gram = DMatrix::from_fn(words.len(), words.len(), |u, v| mu.coeff(&words[u].reversed().concat(&words[v])));
    check_gram_psd(&gram, k)?;
    let basis = gram_basis(&gram);
    // The first `d` words are the letters themselves.
    let vectors = (0..mu.d())
        .map(|i| (0..basis.ncols()).map(|m| (0..words.len()).map(|u| basis[(u, m)] * gram[(u, i)]).sum()).collect())
        .collect();
    let ops = compressed_ops(&words, &basis, mu.d(), |w| mu.coeff(w));
    let scalars = (1..=mu.d()).map(|i| mu.coeff(&Word::new(vec![i]))).collect();
    OperatorData::new(vectors, ops, scalars)
}

/// Boolean cumulant series of the vacuum state of a Boolean model, read
/// off the data: `η[x_i] = α_i`, `η[x_i x_u x_j] = <ε_i, S_u ε_j>`.
pub fn boolean_cumulants_from_data<T: Scalar>(data: &OperatorData<T>, order: usize) -> CumulantSeries<T> {
    CumulantSeries::new(CumulantKind::Boolean, cumulant_series(data, order)).expect("zero constant term")
}

/// Boolean cumulants of the vacuum moments of a model, for cross-checks.
pub fn model_boolean_cumulants<T: Scalar>(model: &FockModel<T>, order: usize) -> Result<CumulantSeries<T>> {
    Ok(boolean_from_moments(&model.vacuum_moments(order)?))
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::meixner::psd_check_with;
    use crate::random::{random_cumulant_data, random_state_data, seeded};
    use crate::transforms::monotone_convolve;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn assembled_operators_are_symmetric(seed in any::<u64>(), d in 1usize..=2, dim in 1usize..=2) {
            let mut rng = seeded(seed);
            let psi = random_state_data(&mut rng, d, dim);
            let mu = random_cumulant_data(&mut rng, d, dim);
            prop_assert_eq!(build_boolean_model(&mu).asymmetry(), 0.0);
            prop_assert_eq!(build_full_model(&mu, 3).unwrap().asymmetry(), 0.0);
            let tensor = tensor_eta_model(&psi, &mu).unwrap();
            prop_assert!(tensor.ops.iter().all(|m| m.asymmetry() == 0.0));
            let fsum = free_sum_model(&psi.map(|x| x.to_f64_lossy()), &mu.map(|x| x.to_f64_lossy()), 3).unwrap();
            prop_assert!(fsum.ops.iter().all(|m| m.asymmetry() <= 1e-12));
        }

        #[test]
        fn models_agree_with_series(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = seeded(seed);
            let psi = random_state_data(&mut rng, d, 2);
            let mu = random_cumulant_data(&mut rng, d, 2);
            let rho = moments_from_free(&CumulantSeries::new(CumulantKind::Free, cumulant_series(&mu, 4)).unwrap());
            prop_assert_eq!(build_full_model(&mu, 4).unwrap().vacuum_moments(4).unwrap(), rho.clone());
            let phi = phi_map(&rho, &state_moments(&psi, 4)).unwrap();
            let tensor = tensor_eta_model(&psi, &mu).unwrap();
            prop_assert_eq!(build_boolean_model(&tensor).vacuum_moments(4).unwrap(), phi);
        }

        #[test]
        fn tensor_product_is_monotone(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = seeded(seed);
            let psi = random_state_data(&mut rng, d, 2);
            let h = random_state_data(&mut rng, d, 2);
            let joint = state_moments(&tensor_eta_model(&psi, &h).unwrap(), 4);
            prop_assert_eq!(joint, monotone_convolve(&state_moments(&h, 4), &state_moments(&psi, 4)).unwrap());
        }

        #[test]
        fn eta_gram_is_conditionally_positive(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = seeded(seed);
            let psi = random_state_data(&mut rng, d, 2).map(|x| x.to_f64_lossy());
            let mu = random_cumulant_data(&mut rng, d, 2).map(|x| x.to_f64_lossy());
            let eta = cumulant_series(&tensor_eta_model(&psi, &mu).unwrap(), 6);
            let f = Functional::new(&eta + &NcSeries::one(d, 6)).unwrap();
            prop_assert!(psd_check_with(&f, 3, true, 1e-9).unwrap().psd);
        }
    }
}
