//! One-variable measures through their Jacobi parameters: the three-term
//! recursion, the free Meixner family, quadratic PDE residuals, and
//! positive-semidefiniteness checks for moment functionals.

use crate::cumulants::{boolean_from_moments, free_from_moments, two_state_from_pair, Functional};
use crate::error::{Error, Result};
use crate::linalg::{psd_verdict, DenseMatrix, PsdVerdict};
use crate::scalar::Scalar;
use crate::series::{NcSeries, Word};
use crate::transforms::{boolean_convolve, boolean_power, delta_state, free_power, translate};

/// Default relative eigenvalue tolerance for PSD verdicts.
pub const DEFAULT_PSD_EPS: f64 = 1e-9;

/// Recursion coefficients of the monic orthogonal polynomials,
/// `x P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1}`.
///
/// `beta` holds `beta_0, beta_1, ...` and `gamma` holds `gamma_1, gamma_2, ...`.
/// A zero `gamma_k` means finite support; later entries are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiParams<T> {
    pub beta: Vec<T>,
    pub gamma: Vec<T>,
}

impl<T: Scalar> JacobiParams<T> {
    pub fn new(beta: Vec<T>, gamma: Vec<T>) -> Self {
        Self { beta, gamma }
    }

    /// Constant sequences `(beta, beta, ...)`, `(gamma, gamma, ...)` with
    /// `levels` entries each.
    pub fn constant(beta: T, gamma: T, levels: usize) -> Self {
        Self { beta: vec![beta; levels], gamma: vec![gamma; levels] }
    }

    /// `SC(mean, variance)`.
    pub fn semicircle(mean: T, variance: T, levels: usize) -> Self {
        Self::constant(mean, variance, levels)
    }

    /// The normalized free Meixner law `mu_{b,c}`: `(0, b, b, ...)`, `(1, 1+c, 1+c, ...)`.
    pub fn meixner(b: T, c: T, levels: usize) -> Self {
        let levels = levels.max(1);
        let mut beta = vec![b; levels];
        beta[0] = T::zero();
        let mut gamma = vec![T::one() + c; levels];
        gamma[0] = T::one();
        Self { beta, gamma }
    }

    /// Index (1-based) of the first vanishing `gamma`, if any.
    pub fn first_zero_gamma(&self) -> Option<usize> {
        self.gamma.iter().position(|g| g.is_zero()).map(|k| k + 1)
    }

    /// Levels `0..dim` a path of length `order` from level 0 can visit and
    /// return from.
    fn dim_for(&self, order: usize) -> usize {
        match self.first_zero_gamma() {
            Some(z) if z <= order / 2 => z,
            _ => order / 2 + 1,
        }
    }

    /// `(beta count, gamma count)` that moments up to degree `order` depend on.
    fn needed(&self, order: usize) -> (usize, usize) {
        let dim = self.dim_for(order);
        let gammas = match self.first_zero_gamma() {
            Some(z) if z <= order / 2 => z,
            _ => order / 2,
        };
        (dim.min(order.div_ceil(2)), gammas)
    }

    /// Keeps the entries that determine moments up to degree `order`.
    pub fn head(&self, order: usize) -> Self {
        let (nb, ng) = self.needed(order);
        Self {
            beta: self.beta.iter().take(nb).cloned().collect(),
            gamma: self.gamma.iter().take(ng).cloned().collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> JacobiParams<U> {
        JacobiParams { beta: self.beta.iter().map(&f).collect(), gamma: self.gamma.iter().map(&f).collect() }
    }
}

/// Moments `m_n = (T^n)_{00}` of the tridiagonal matrix with diagonal
/// `beta`, super-diagonal 1 and sub-diagonal `gamma`; exact over rationals.
///
/// Needs `beta_0..beta_{⌈N/2⌉-1}` and `gamma_1..gamma_{⌊N/2⌋}`, or fewer
/// when some `gamma` vanishes earlier.
pub fn moments_from_jacobi<T: Scalar>(j: &JacobiParams<T>, order: usize) -> Result<Functional<T>> {
    let (nb, ng) = j.needed(order);
    if j.beta.len() < nb || j.gamma.len() < ng {
        return Err(Error::InsufficientJacobi { order });
    }
    let dim = j.dim_for(order);
    // the diagonal entry of an unreturnable top level never contributes
    let beta = |k: usize| j.beta.get(k).cloned().unwrap_or_else(T::zero);
    let mut moments = vec![T::one()];
    // row vector e_0^T T^n
    let mut row = vec![T::zero(); dim];
    row[0] = T::one();
    for _ in 1..=order {
        let mut next = vec![T::zero(); row.len()];
        for k in 0..row.len() {
            if row[k].is_zero() {
                continue;
            }
            next[k] += row[k].mul_ref(&beta(k));
            if k + 1 < row.len() {
                next[k + 1] += row[k].clone();
            }
            if k > 0 {
                next[k - 1] += row[k].mul_ref(&j.gamma[k - 1]);
            }
        }
        row = next;
        moments.push(row[0].clone());
    }
    Ok(Functional::from_fn(1, order, |w| moments[w.degree()].clone()))
}

fn require_single<T: Scalar>(f: &Functional<T>) -> Result<()> {
    if f.d() != 1 {
        return Err(Error::SingleVariableOnly { d: f.d() });
    }
    Ok(())
}

/// Jacobi parameters `beta_0..beta_{L-1}`, `gamma_1..gamma_L` by exact
/// Gram–Schmidt on monic polynomials. Stops at the first vanishing
/// `gamma_k` (included in the output): the measure then has `k` atoms.
pub fn jacobi_from_moments<T: Scalar>(f: &Functional<T>, levels: usize) -> Result<JacobiParams<T>> {
    require_single(f)?;
    if 2 * levels > f.order() {
        return Err(Error::LevelTooDeep { level: levels, needed: 2 * levels, order: f.order() });
    }
    let m: Vec<T> = (0..=f.order()).map(|n| f.moment(&Word::new(vec![1; n]))).collect();
    let inner = |p: &[T], q: &[T]| -> T {
        let mut s = T::zero();
        for (i, a) in p.iter().enumerate() {
            for (k, b) in q.iter().enumerate() {
                s += a.mul_ref(b).mul_ref(&m[i + k]);
            }
        }
        s
    };
    let times_x = |p: &[T]| -> Vec<T> {
        let mut out = vec![T::zero()];
        out.extend(p.iter().cloned());
        out
    };
    let mut out: JacobiParams<T> = JacobiParams { beta: Vec::new(), gamma: Vec::new() };
    let mut prev: Vec<T> = Vec::new();
    let mut cur: Vec<T> = vec![T::one()];
    let mut h_cur = T::one();
    for k in 0..levels {
        let xp = times_x(&cur);
        let beta = inner(&xp, &cur) / h_cur.clone();
        let mut next = xp;
        for (i, c) in cur.iter().enumerate() {
            next[i] -= beta.mul_ref(c);
        }
        if k > 0 {
            let g = out.gamma[k - 1].clone();
            for (i, c) in prev.iter().enumerate() {
                next[i] -= g.mul_ref(c);
            }
        }
        out.beta.push(beta);
        let h_next = inner(&next, &next);
        let gamma = h_next.clone() / h_cur.clone();
        let done = gamma.is_negligible();
        out.gamma.push(if done { T::zero() } else { gamma });
        if done {
            break;
        }
        prev = std::mem::replace(&mut cur, next);
        h_cur = h_next;
    }
    Ok(out)
}

/// Jacobi parameters of `delta_alpha ⊎ mu^{⊎t}`:
/// `(alpha + t beta_0, beta_1, ...)`, `(t gamma_1, gamma_2, ...)`.
pub fn boolean_shift_jacobi<T: Scalar>(j: &JacobiParams<T>, alpha: &T, t: &T) -> JacobiParams<T> {
    let mut out = j.clone();
    if let Some(b0) = out.beta.first_mut() {
        *b0 = alpha.clone() + t.mul_ref(b0);
    }
    if let Some(g1) = out.gamma.first_mut() {
        *g1 = t.mul_ref(g1);
    }
    out
}

/// How a normalized free Meixner law is dressed to a given mean and variance.
#[derive(Clone, Debug, PartialEq)]
pub enum Dressing<T> {
    None,
    /// `mu^{⊞t} ⊞ delta_alpha`.
    Free { alpha: T, t: T },
    /// `mu^{⊎t} ⊎ delta_alpha`.
    Boolean { alpha: T, t: T },
}

/// A free Meixner law `mu_{b,c}` with optional dressing.
#[derive(Clone, Debug, PartialEq)]
pub struct MeixnerParams<T> {
    pub b: T,
    pub c: T,
    pub dressing: Dressing<T>,
}

impl<T: Scalar> MeixnerParams<T> {
    pub fn normalized(b: T, c: T) -> Self {
        Self { b, c, dressing: Dressing::None }
    }

    /// `1 + c >= 0`, the state condition for the normalized law.
    pub fn is_state(&self) -> bool {
        !(T::one() + self.c.clone()).is_negative()
    }
}

/// Moments of a (possibly dressed) free Meixner law up to degree `order`.
pub fn meixner_functional<T: Scalar>(p: &MeixnerParams<T>, order: usize) -> Functional<T> {
    let base = JacobiParams::meixner(p.b.clone(), p.c.clone(), order / 2 + 1);
    let mu = moments_from_jacobi(&base, order).expect("enough levels by construction");
    match &p.dressing {
        Dressing::None => mu,
        Dressing::Free { alpha, t } => translate(&free_power(&mu, t), &[alpha.clone()]).expect("d = 1"),
        Dressing::Boolean { alpha, t } => {
            boolean_convolve(&boolean_power(&mu, t), &delta_state(&[alpha.clone()], order)).expect("d = 1")
        }
    }
}

/// Residual series of a quadratic PDE check, one per index pair `(i, j)`
/// in row-major order (a single entry for one variable).
#[derive(Clone, Debug)]
pub struct PdeResidual<T> {
    pub residuals: Vec<NcSeries<T>>,
}

impl<T: Scalar> PdeResidual<T> {
    pub fn is_zero(&self) -> bool {
        self.residuals.iter().all(|r| r.terms().all(|(_, c)| c.is_negligible()))
    }

    /// Lowest degree of the differentiated series at which a residual is nonzero.
    pub fn first_failing_degree(&self) -> Option<usize> {
        self.residuals
            .iter()
            .filter_map(|r| r.terms().find(|(_, c)| !c.is_negligible()).map(|(w, _)| w.degree()))
            .min()
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().map(NcSeries::max_abs).fold(0.0, f64::max)
    }
}

/// Both forms of the one-variable Meixner check.
#[derive(Clone, Debug)]
pub struct MeixnerPdeReport<T> {
    /// `D^2 R - 1 - b DR - c (DR)^2`.
    pub free_form: PdeResidual<T>,
    /// `D^2 eta - 1 - b D eta - (1+c) (D eta)^2`.
    pub boolean_form: PdeResidual<T>,
}

impl<T: Scalar> MeixnerPdeReport<T> {
    pub fn is_zero(&self) -> bool {
        self.free_form.is_zero() && self.boolean_form.is_zero()
    }
}

/// `D_i D_j F - delta_ij * v - sum_k B[i][j][k] D_k F - C[i][j] D_i F D_j F`,
/// where `D_i D_j F` means `D_i (D_j F)`.
pub fn quadratic_pde_residual<T: Scalar>(
    f: &NcSeries<T>,
    variance: &T,
    b: &[Vec<Vec<T>>],
    c: &[Vec<T>],
) -> Result<PdeResidual<T>> {
    let d = f.d();
    if b.len() != d || c.len() != d || b.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) || c.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!("PDE coefficients must be {d}x{d}x{d} and {d}x{d}")));
    }
    let first: Vec<NcSeries<T>> = (1..=d).map(|i| f.left_derivative(i)).collect::<Result<_>>()?;
    let order = f.order().saturating_sub(2);
    let mut residuals = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut r = first[j].left_derivative(i + 1)?;
            if i == j {
                r = &r - &NcSeries::constant(d, order, variance.clone());
            }
            for (k, dk) in first.iter().enumerate() {
                r = &r - &dk.truncate(order).scale(&b[i][j][k]);
            }
            let prod = &first[i] * &first[j];
            r = &r - &prod.truncate(order).scale(&c[i][j]);
            residuals.push(r);
        }
    }
    Ok(PdeResidual { residuals })
}

fn scalar_coeffs<T: Scalar>(b: &T, c: &T) -> (Vec<Vec<Vec<T>>>, Vec<Vec<T>>) {
    (vec![vec![vec![b.clone()]]], vec![vec![c.clone()]])
}

/// One-variable Meixner check of `f` against parameters `(b, c)`.
pub fn meixner_pde_check<T: Scalar>(f: &Functional<T>, b: &T, c: &T) -> Result<MeixnerPdeReport<T>> {
    require_single(f)?;
    let r = free_from_moments(f).into_series();
    let eta = boolean_from_moments(f).into_series();
    let (bb, cc) = scalar_coeffs(b, c);
    let free_form = quadratic_pde_residual(&r, &T::one(), &bb, &cc)?;
    let (_, cc1) = scalar_coeffs(b, &(T::one() + c.clone()));
    let boolean_form = quadratic_pde_residual(&eta, &T::one(), &bb, &cc1)?;
    Ok(MeixnerPdeReport { free_form, boolean_form })
}

/// Multivariate check with coefficient tensors `b[i][j][k] = B^k_{ij}` and `c[i][j] = C_{ij}`.
pub fn meixner_pde_check_multi<T: Scalar>(
    f: &Functional<T>,
    b: &[Vec<Vec<T>>],
    c: &[Vec<T>],
) -> Result<MeixnerPdeReport<T>> {
    let r = free_from_moments(f).into_series();
    let eta = boolean_from_moments(f).into_series();
    let free_form = quadratic_pde_residual(&r, &T::one(), b, c)?;
    let c1: Vec<Vec<T>> = c.iter().map(|row| row.iter().map(|x| T::one() + x.clone()).collect()).collect();
    let boolean_form = quadratic_pde_residual(&eta, &T::one(), b, &c1)?;
    Ok(MeixnerPdeReport { free_form, boolean_form })
}

/// One-variable two-state form:
/// `D^2 R^{phi,psi} - 1 - b DR^{phi,psi} - (1+c)(DR^{phi,psi})^2 + DR^psi DR^{phi,psi}`.
pub fn two_state_pde_check<T: Scalar>(phi: &Functional<T>, psi: &Functional<T>, b: &T, c: &T) -> Result<PdeResidual<T>> {
    require_single(phi)?;
    let r = two_state_from_pair(phi, psi)?.into_series();
    let r_psi = free_from_moments(&psi.truncate(r.order())).into_series();
    let (bb, cc) = scalar_coeffs(b, &(T::one() + c.clone()));
    let mut out = quadratic_pde_residual(&r, &T::one(), &bb, &cc)?;
    let cross = &r_psi.left_derivative(1)? * &r.left_derivative(1)?;
    out.residuals[0] = &out.residuals[0] + &cross.truncate(r.order().saturating_sub(2));
    Ok(out)
}

/// Gram matrix `G[u, v] = f[x_{reverse(u)} x_v]` over words of degree
/// `0..=k`, or `1..=k` when `conditional`.
pub fn gram_matrix<T: Scalar>(f: &Functional<T>, k: usize, conditional: bool) -> Result<DenseMatrix<T>> {
    if 2 * k > f.order() {
        return Err(Error::LevelTooDeep { level: k, needed: 2 * k, order: f.order() });
    }
    let words: Vec<Word> = Word::all(f.d(), k).filter(|w| !(conditional && w.is_empty())).collect();
    Ok(DenseMatrix::from_fn(words.len(), words.len(), |i, j| f.moment(&words[i].reversed().concat(&words[j]))))
}

/// Positivity of `f` on polynomials of degree `<= k` (or without constant
/// term when `conditional`), with relative eigenvalue tolerance `eps`.
pub fn psd_check_with<T: Scalar>(f: &Functional<T>, k: usize, conditional: bool, eps: f64) -> Result<PsdVerdict> {
    Ok(psd_verdict(&gram_matrix(f, k, conditional)?, eps))
}

/// [`psd_check_with`] at the default tolerance, full Gram matrix.
pub fn psd_check<T: Scalar>(f: &Functional<T>, k: usize) -> Result<PsdVerdict> {
    psd_check_with(f, k, false, DEFAULT_PSD_EPS)
}

/// Hankel matrix `[h_{i+j}]_{i,j <= k}` of a sequence.
pub fn hankel<T: Scalar>(seq: &[T], k: usize) -> Result<DenseMatrix<T>> {
    if 2 * k >= seq.len() {
        return Err(Error::LevelTooDeep { level: k, needed: 2 * k, order: seq.len().saturating_sub(1) });
    }
    Ok(DenseMatrix::from_fn(k + 1, k + 1, |i, j| seq[i + j].clone()))
}

/// Result of [`cpd_one_variable_check`].
#[derive(Clone, Debug)]
pub struct CompositeReport<T> {
    /// Coefficients of `f(z g(z)) g(z)` through degree `N`.
    pub composite: Vec<T>,
    pub verdict: PsdVerdict,
}

/// Composes `f(z g(z)) g(z)` exactly and tests its Hankel matrix at level `⌊N/2⌋`.
pub fn cpd_one_variable_check<T: Scalar>(fseq: &[T], gseq: &[T], order: usize) -> Result<CompositeReport<T>> {
    if fseq.len() <= order || gseq.len() <= order {
        return Err(Error::DegreeTooLarge { degree: order, order: fseq.len().min(gseq.len()).saturating_sub(1) });
    }
    let series = |s: &[T]| NcSeries::from_fn(1, order, |w| s[w.degree()].clone());
    let (f, g) = (series(fseq), series(gseq));
    let zg = &NcSeries::var(1, order, 1)? * &g;
    let h = &f.substitute(&[zg])? * &g;
    let composite: Vec<T> = (0..=order).map(|n| h.coeff(&Word::new(vec![1; n]))).collect();
    let verdict = psd_verdict(&hankel(&composite, order / 2)?, DEFAULT_PSD_EPS);
    Ok(CompositeReport { composite, verdict })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::random::{random_jacobi, seeded};
    use crate::scalar::{q, Rational};
    use crate::transforms::{b_map, free_power, phi_map, translate};
    use proptest::prelude::*;

    fn small() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=2).prop_map(|(n, d)| q(n, d))
    }

    fn nonneg() -> impl Strategy<Value = Rational> {
        (0i64..=4, 1i64..=2).prop_map(|(n, d)| q(n, d))
    }

    fn mu(b: &Rational, c: &Rational, order: usize) -> Functional<Rational> {
        meixner_functional(&MeixnerParams::normalized(b.clone(), c.clone()), order)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn jacobi_round_trip(seed in any::<u64>(), levels in 1usize..=4) {
            let j = random_jacobi(&mut seeded(seed), levels + 1);
            let f = moments_from_jacobi(&j, 2 * levels).unwrap();
            prop_assert_eq!(jacobi_from_moments(&f, levels).unwrap(), j.head(2 * levels));
        }

        #[test]
        fn meixner_orbit_is_closed(b in small(), c in nonneg(), alpha in small(), t in nonneg()) {
            let c = c - q(1, 1);
            let image = b_map(&mu(&b, &c, 8), std::slice::from_ref(&alpha), &t).unwrap();
            let params = jacobi_from_moments(&image, 4).unwrap();
            prop_assert_eq!(params, JacobiParams::meixner(b + alpha, c + t, 5).head(8));
        }

        #[test]
        fn meixner_characterization(b in small(), c in nonneg(), alpha in small(), s in nonneg(), t in (1i64..=6, 1i64..=2)) {
            let t = q(t.0, t.1);
            let c = c - q(1, 1);
            let base = mu(&b, &c, 6);
            let psi_1 = translate(&free_power(&base, &(q(1, 1) + &s)), std::slice::from_ref(&alpha)).unwrap();
            let phi_t = phi_map(&free_power(&base, &t), &free_power(&psi_1, &t)).unwrap();
            let bt = b.clone() + alpha.clone() * &t;
            let ct = c.clone() - q(1, 1) + (q(1, 1) + &s) * &t;
            let expected = crate::transforms::boolean_power(&mu(&bt, &ct, 6), &t);
            prop_assert_eq!(&phi_t, &expected);
            // Coefficients of the Boolean PDE D^2 eta = t + b(t) D eta + c(t) (D eta)^2.
            let eta = crate::cumulants::boolean_from_moments(&phi_t).into_series();
            let ct_form = (c + (q(1, 1) + &s) * &t) / t.clone();
            let res = quadratic_pde_residual(&eta, &t, &[vec![vec![bt]]], &[vec![ct_form]]).unwrap();
            prop_assert!(res.is_zero());
        }

        #[test]
        fn meixner_states_are_positive(b in small(), c in nonneg(), k in 1usize..=4) {
            let c = c - q(1, 1);
            let verdict = psd_check(&mu(&b, &c, 2 * k), k).unwrap();
            prop_assert!(verdict.accepted());
        }
    }
}
