//! Maps on functionals: convolutions, convolution powers, the c-free map
//! `Phi[rho, psi]`, the `B_{a,t}` semigroup and the maps built from them.
//!
//! Everything operates on [`Functional`]s of any unital kind; positivity is
//! never enforced here.

pub mod oracle;

use crate::cumulants::{
    boolean_from_moments, conjugated_composition, free_from_moments, moments_from_boolean, moments_from_free,
    shifted_variables, CumulantKind, CumulantSeries, Functional,
};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::series::{NcSeries, Word};

fn same_d<T: Scalar>(a: &Functional<T>, b: &Functional<T>) -> Result<usize> {
    if a.d() != b.d() {
        return Err(Error::AlphabetMismatch { left: a.d(), right: b.d() });
    }
    Ok(a.order().min(b.order()))
}

fn from_eta<T: Scalar>(eta: NcSeries<T>) -> Functional<T> {
    moments_from_boolean(&CumulantSeries::new(CumulantKind::Boolean, eta).expect("zero constant term"))
}

fn from_r<T: Scalar>(r: NcSeries<T>) -> Functional<T> {
    moments_from_free(&CumulantSeries::new(CumulantKind::Free, r).expect("zero constant term"))
}

fn eta_of<T: Scalar>(f: &Functional<T>) -> NcSeries<T> {
    boolean_from_moments(f).into_series()
}

fn r_of<T: Scalar>(f: &Functional<T>) -> NcSeries<T> {
    free_from_moments(f).into_series()
}

/// `sum_i a_i z_i`, the cumulant series (of every kind) of `delta_a`.
pub fn linear_series<T: Scalar>(a: &[T], order: usize) -> NcSeries<T> {
    let mut s = NcSeries::zero(a.len(), order);
    if order > 0 {
        for (i, ai) in a.iter().enumerate() {
            s.set(&Word::new(vec![i + 1]), ai.clone()).expect("degree 1 fits");
        }
    }
    s
}

/// `a ⊞ b`: free cumulants add.
pub fn free_convolve<T: Scalar>(a: &Functional<T>, b: &Functional<T>) -> Result<Functional<T>> {
    let order = same_d(a, b)?;
    Ok(from_r(&r_of(&a.truncate(order)) + &r_of(&b.truncate(order))))
}

/// `a ⊎ b`: Boolean cumulants add.
pub fn boolean_convolve<T: Scalar>(a: &Functional<T>, b: &Functional<T>) -> Result<Functional<T>> {
    let order = same_d(a, b)?;
    Ok(from_eta(&eta_of(&a.truncate(order)) + &eta_of(&b.truncate(order))))
}

/// `a^{⊞t}`: free cumulants scaled by `t`.
pub fn free_power<T: Scalar>(a: &Functional<T>, t: &T) -> Functional<T> {
    from_r(r_of(a).scale(t))
}

/// `a^{⊎t}`: Boolean cumulants scaled by `t`.
pub fn boolean_power<T: Scalar>(a: &Functional<T>, t: &T) -> Functional<T> {
    from_eta(eta_of(a).scale(t))
}

/// `delta_a[P] = P(a_1, ..., a_d)`.
pub fn delta_state<T: Scalar>(a: &[T], order: usize) -> Functional<T> {
    Functional::delta(a, order)
}

/// `a ⊞ delta_shift`: translation of every variable by the given vector.
pub fn translate<T: Scalar>(f: &Functional<T>, shift: &[T]) -> Result<Functional<T>> {
    if shift.len() != f.d() {
        return Err(Error::AlphabetMismatch { left: f.d(), right: shift.len() });
    }
    Ok(from_r(&r_of(f) + &linear_series(shift, f.order())))
}

/// The free product of standard semicirculars, `R(z) = sum_i z_i^2`.
pub fn standard_semicircular<T: Scalar>(d: usize, order: usize) -> Functional<T> {
    let mut r = NcSeries::zero(d, order);
    if order >= 2 {
        for i in 1..=d {
            r.set(&Word::new(vec![i, i]), T::one()).expect("degree 2 fits");
        }
    }
    from_r(r)
}

/// Monotone convolution:
/// `1 + M^{tau ▷ psi}(w) = (1 + M^tau((1 + M^psi(w)) w)) (1 + M^psi(w))`.
pub fn monotone_convolve<T: Scalar>(tau: &Functional<T>, psi: &Functional<T>) -> Result<Functional<T>> {
    let order = same_d(tau, psi)?;
    let p = psi.moments().truncate(order);
    let outer = tau.moments().truncate(order).substitute(&shifted_variables(&p))?;
    Functional::new(&outer * &p)
}

/// `Phi[rho, psi]`: the functional whose two-state cumulants relative to
/// `psi` are the free cumulants of `rho`.
pub fn phi_map<T: Scalar>(rho: &Functional<T>, psi: &Functional<T>) -> Result<Functional<T>> {
    let order = same_d(rho, psi)?;
    let r = r_of(&rho.truncate(order));
    Ok(from_eta(conjugated_composition(&r, &psi.moments().truncate(order))?))
}

/// `Phi[psi] = Phi[gamma, psi]` for `gamma` the standard semicircular
/// product, computed directly from `eta(w) = sum_i w_i (1 + M^psi(w)) w_i`.
pub fn phi_one_arg<T: Scalar>(psi: &Functional<T>) -> Functional<T> {
    let (d, order) = (psi.d(), psi.order());
    let mut eta = NcSeries::zero(d, order);
    for i in 1..=d {
        let z = NcSeries::var(d, order, i).expect("index in range");
        eta = &eta + &(&(&z * psi.moments()) * &z);
    }
    from_eta(eta)
}

/// The Boolean-to-free Bercovici–Pata map `B`: `R^{B[phi]} = eta^phi`.
/// Coincides with `b_map(phi, 0, 1)`.
pub fn bercovici_pata<T: Scalar>(phi: &Functional<T>) -> Functional<T> {
    from_r(eta_of(phi))
}

/// Inverse of [`bercovici_pata`]: `eta^{B^{-1}[rho]} = R^rho`, which is
/// also `Phi[rho, delta_0]`.
pub fn bercovici_pata_inverse<T: Scalar>(rho: &Functional<T>) -> Functional<T> {
    from_eta(r_of(rho))
}

/// `B_{a,t}[rho] = ((rho^{⊞(1+t)} ⊞ delta_a) ⊎ delta_{-a})^{⊎ 1/(1+t)}`.
///
/// `t = -1` is rejected; `Phi[rho, delta_a]` covers that case.
pub fn b_map<T: Scalar>(rho: &Functional<T>, a: &[T], t: &T) -> Result<Functional<T>> {
    if a.len() != rho.d() {
        return Err(Error::AlphabetMismatch { left: rho.d(), right: a.len() });
    }
    let s = T::one() + t.clone();
    if s.is_zero() {
        return Err(Error::TimeMinusOne);
    }
    let lin = linear_series(a, rho.order());
    let inner = from_r(&r_of(rho).scale(&s) + &lin);
    let eta = &eta_of(&inner) - &lin;
    Ok(from_eta(eta.scale(&(T::one() / s))))
}

/// The Boolean-to-Fermi map `B_{(rho[x_1], ..., rho[x_d]), 0}`.
pub fn fermi_image<T: Scalar>(rho: &Functional<T>) -> Functional<T> {
    b_map(rho, &rho.mean(), &T::zero()).expect("t = 0 and matching alphabet")
}

/// Orthogonal convolution in one variable, `tau ⊢ psi = Phi[B[tau], psi]`.
pub fn orthogonal_convolve<T: Scalar>(tau: &Functional<T>, psi: &Functional<T>) -> Result<Functional<T>> {
    for f in [tau, psi] {
        if f.d() != 1 {
            return Err(Error::SingleVariableOnly { d: f.d() });
        }
    }
    phi_map(&bercovici_pata(tau), psi)
}

/// Recovers `psi` from `rho` and `phi = Phi[rho, psi]`.
///
/// Uses `D_j eta^phi(w) = (D_j R^rho)((1 + M^psi(w)) w)`: the moment
/// `psi[x_v]` first appears at degree `|v| + 1` of `D_j eta^phi`, multiplied
/// by the covariance entry `R^rho[x_j x_k]`. A degree-`N` `phi` therefore
/// determines `psi` only through degree `N - 2`, which is the order of the
/// result. The answer is verified by recomputing `Phi[rho, psi]`.
pub fn recover_psi<T: Scalar>(rho: &Functional<T>, phi: &Functional<T>) -> Result<Functional<T>> {
    let order = same_d(rho, phi)?;
    let d = rho.d();
    if order < 2 {
        return Err(Error::Underdetermined { degree: 0 });
    }
    let r = r_of(&rho.truncate(order));
    let cov: Vec<Vec<T>> = (1..=d).map(|j| (1..=d).map(|k| r.at(&[j, k]).clone()).collect()).collect();
    if crate::linalg::DenseMatrix::from_rows(cov.clone())?.determinant().is_negligible() {
        return Err(Error::Underdetermined { degree: 1 });
    }
    // pivot on the largest covariance entry
    let (pj, pk) = (0..d)
        .flat_map(|j| (0..d).map(move |k| (j, k)))
        .max_by(|&(a, b), &(c, e)| {
            cov[a][b].abs().partial_cmp(&cov[c][e].abs()).unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("d > 0");
    let c = cov[pj][pk].clone();
    let eta = eta_of(&phi.truncate(order));
    let d_eta = eta.left_derivative(pj + 1)?;
    let d_r = r.left_derivative(pj + 1)?;

    let psi_order = order - 2;
    let mut p = NcSeries::one(d, psi_order);
    for m in 1..=psi_order {
        let trial = p.truncate(m);
        let subs: Vec<_> = shifted_variables(&trial.extend_with_zeros(m + 1));
        let known = d_r.truncate(m + 1).substitute(&subs)?;
        for v in Word::of_degree(d, m) {
            let target = v.concat(&Word::new(vec![pk + 1]));
            let val = (d_eta.coeff(&target) - known.coeff(&target)) / c.clone();
            p.set(&v, val)?;
        }
    }
    let psi = Functional::new(p)?;
    let check = phi_map(&rho.truncate(order), &Functional::new(psi.moments().extend_with_zeros(order))?)?;
    if let Some((w, _, _)) = check.moments().first_difference(phi.truncate(order).moments()) {
        if !T::EXACT && check.moments().max_abs_diff(phi.moments()) < 1e-8 {
            return Ok(psi);
        }
        return Err(Error::NotInImage { degree: w.degree() });
    }
    Ok(psi)
}

/// Coefficient-wise differences for both parts of the evolution identity.
#[derive(Clone, Debug)]
pub struct EvolutionReport<T> {
    /// `Phi[rho^{⊞t} ⊞ delta_a, psi]` minus `Phi[rho, psi]^{⊎t} ⊎ delta_a`.
    pub part_a: Vec<(Word, T)>,
    /// `Phi[rho, psi ⊞ rho^{⊞t} ⊞ delta_a]` minus `B_{a,t}[Phi[rho, psi]]`.
    pub part_b: Vec<(Word, T)>,
}

impl<T: Scalar> EvolutionReport<T> {
    pub fn max_abs(&self) -> f64 {
        self.part_a
            .iter()
            .chain(&self.part_b)
            .map(|(_, c)| c.abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// Exact equality for rational input, `tol` otherwise.
    pub fn passed(&self, tol: f64) -> bool {
        if T::EXACT {
            self.part_a.is_empty() && self.part_b.is_empty()
        } else {
            self.max_abs() <= tol
        }
    }

    /// Lowest-degree word where either part fails.
    pub fn first_failure(&self) -> Option<&Word> {
        self.part_a.iter().chain(&self.part_b).map(|(w, _)| w).min_by_key(|w| w.degree())
    }
}

/// Evaluates both sides of the evolution identities for `Phi`.
pub fn evolution_check<T: Scalar>(
    rho: &Functional<T>,
    psi: &Functional<T>,
    a: &[T],
    t: &T,
) -> Result<EvolutionReport<T>> {
    let order = same_d(rho, psi)?;
    let (rho, psi) = (rho.truncate(order), psi.truncate(order));
    let phi = phi_map(&rho, &psi)?;

    let rho_t_a = translate(&free_power(&rho, t), a)?;
    let lhs_a = phi_map(&rho_t_a, &psi)?;
    let rhs_a = boolean_convolve(&boolean_power(&phi, t), &delta_state(a, order))?;

    let lhs_b = phi_map(&rho, &free_convolve(&psi, &rho_t_a)?)?;
    let rhs_b = b_map(&phi, a, t)?;

    Ok(EvolutionReport {
        part_a: lhs_a.moments().differences(rhs_a.moments()),
        part_b: lhs_b.moments().differences(rhs_b.moments()),
    })
}

/// A map on functionals with exact parameters, for batch and CLI use.
#[derive(Clone, Debug, PartialEq)]
pub enum MapDescriptor {
    FreeConv,
    BooleanConv,
    MonotoneConv,
    OrthogonalConv,
    FreePower(Rational),
    BooleanPower(Rational),
    /// Translation `f ⊞ delta_a`.
    Delta(Vec<Rational>),
    PhiMap,
    BMap { a: Vec<Rational>, t: Rational },
}

impl MapDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FreeConv => "free-conv",
            Self::BooleanConv => "boolean-conv",
            Self::MonotoneConv => "monotone-conv",
            Self::OrthogonalConv => "orthogonal-conv",
            Self::FreePower(_) => "free-power",
            Self::BooleanPower(_) => "boolean-power",
            Self::Delta(_) => "delta",
            Self::PhiMap => "phi-map",
            Self::BMap { .. } => "b-map",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Self::FreePower(_) | Self::BooleanPower(_) | Self::Delta(_) | Self::BMap { .. } => 1,
            _ => 2,
        }
    }

    /// Applies the map; two-argument maps take `(first, second)` in the
    /// order of their mathematical notation.
    pub fn apply<T: Scalar>(&self, args: &[&Functional<T>]) -> Result<Functional<T>> {
        if args.len() != self.arity() {
            return Err(Error::SubstitutionArity { expected: self.arity(), got: args.len() });
        }
        let conv = |v: &[Rational]| v.iter().map(T::from_rational).collect::<Vec<_>>();
        match self {
            Self::FreeConv => free_convolve(args[0], args[1]),
            Self::BooleanConv => boolean_convolve(args[0], args[1]),
            Self::MonotoneConv => monotone_convolve(args[0], args[1]),
            Self::OrthogonalConv => orthogonal_convolve(args[0], args[1]),
            Self::FreePower(t) => Ok(free_power(args[0], &T::from_rational(t))),
            Self::BooleanPower(t) => Ok(boolean_power(args[0], &T::from_rational(t))),
            Self::Delta(a) => translate(args[0], &conv(a)),
            Self::PhiMap => phi_map(args[0], args[1]),
            Self::BMap { a, t } => b_map(args[0], &conv(a), &T::from_rational(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_functional, seeded};
    use crate::scalar::{q, Rational};

    type F = Functional<Rational>;

    fn w(l: &[usize]) -> Word {
        Word::new(l.to_vec())
    }

    fn eta_functional(d: usize, order: usize, f: impl Fn(&Word) -> Rational) -> F {
        from_eta(NcSeries::from_fn(d, order, |u| if u.is_empty() { q(0, 1) } else { f(u) }))
    }

    /// Two-point law with Boolean cumulants `z^2 / (1 - b z)`.
    fn bernoulli(b: i64, order: usize) -> F {
        eta_functional(1, order, |u| {
            let n = u.degree() as u32;
            if n < 2 { q(0, 1) } else { q(b.pow(n - 2), 1) }
        })
    }

    #[test]
    fn free_convolution_examples() {
        let sc = standard_semicircular::<Rational>(1, 8);
        let sc2 = free_convolve(&sc, &sc).unwrap();
        for n in 0..=4 {
            let word = w(&vec![1; 2 * n]);
            assert_eq!(sc2.moment(&word), sc.moment(&word) * q(1 << n, 1));
        }
        let mut rng = seeded(1);
        let f = random_functional(&mut rng, 2, 5);
        assert_eq!(free_convolve(&f, &F::delta_zero(2, 5)).unwrap(), f);
        let (a, b) = ([q(1, 2), q(-3, 1)], [q(2, 1), q(1, 3)]);
        let sum = [q(5, 2), q(-8, 3)];
        assert_eq!(free_convolve(&F::delta(&a, 5), &F::delta(&b, 5)).unwrap(), F::delta(&sum, 5));
        assert_eq!(translate(&F::delta(&a, 5), &b).unwrap(), F::delta(&sum, 5));
    }

    #[test]
    fn convolution_powers() {
        let mut rng = seeded(2);
        let f = random_functional(&mut rng, 2, 5);
        assert_eq!(boolean_power(&f, &q(1, 1)), f);
        assert_eq!(free_power(&f, &q(1, 1)), f);
        let (s, t) = (q(2, 3), q(-1, 4));
        let lhs = free_power(&f, &(s.clone() + t.clone()));
        assert_eq!(lhs, free_convolve(&free_power(&f, &s), &free_power(&f, &t)).unwrap());
        let lhs = boolean_power(&f, &(s.clone() + t.clone()));
        assert_eq!(lhs, boolean_convolve(&boolean_power(&f, &s), &boolean_power(&f, &t)).unwrap());
    }

    #[test]
    fn delta_state_moments() {
        assert_eq!(delta_state(&[q(2, 1)], 6).moment(&w(&[1; 6])), q(64, 1));
        assert_eq!(delta_state(&[q(1, 1), q(-1, 1)], 3).moment(&w(&[1, 2])), q(-1, 1));
        assert_eq!(delta_state(&[q(0, 1)], 4), F::delta_zero(1, 4));
    }

    #[test]
    fn monotone_examples() {
        let mut rng = seeded(3);
        let psi = random_functional(&mut rng, 2, 5);
        let tau = random_functional(&mut rng, 2, 5);
        let a = [q(3, 2), q(-1, 1)];
        let da = F::delta(&a, 5);
        assert_eq!(monotone_convolve(&da, &psi).unwrap(), boolean_convolve(&da, &psi).unwrap());
        assert_eq!(monotone_convolve(&tau, &F::delta_zero(2, 5)).unwrap(), tau);
        assert_eq!(monotone_convolve(&F::delta_zero(2, 5), &psi).unwrap(), psi);
    }

    #[test]
    fn phi_map_basics() {
        let mut rng = seeded(4);
        let rho = random_functional(&mut rng, 2, 5);
        let psi = random_functional(&mut rng, 2, 5);
        assert_eq!(phi_map(&rho, &rho).unwrap(), rho);
        let gamma = standard_semicircular(2, 5);
        assert_eq!(phi_map(&gamma, &psi).unwrap(), phi_one_arg(&psi));
        assert_eq!(phi_one_arg(&gamma), gamma);
        let bern = phi_one_arg(&F::delta_zero(2, 4));
        let eta = boolean_from_moments(&bern).into_series();
        let expect = NcSeries::from_terms(2, 4, [(w(&[1, 1]), q(1, 1)), (w(&[2, 2]), q(1, 1))]).unwrap();
        assert_eq!(eta, expect);
        let phi = phi_one_arg(&psi);
        assert_eq!(phi.mean(), vec![q(0, 1), q(0, 1)]);
        assert_eq!(phi.covariance(), vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        let phi = phi_map(&rho, &psi).unwrap();
        assert_eq!(phi.mean(), rho.mean());
        assert_eq!(phi.covariance(), rho.covariance());
    }

    #[test]
    fn phi_map_matches_subset_expansion() {
        let mut rng = seeded(5);
        for d in 1..=2 {
            let rho = random_functional(&mut rng, d, 5);
            let psi = random_functional(&mut rng, d, 5);
            let eta = boolean_from_moments(&phi_map(&rho, &psi).unwrap()).into_series();
            assert_eq!(oracle::phi_eta(&rho, &psi).unwrap(), eta);
        }
    }

    #[test]
    fn free_poisson_first_argument() {
        // Phi[mu_{b,0}, psi] = Phi[psi ⊎ delta_b], with mu_{b,0} = B[bernoulli(b)]
        let mut rng = seeded(6);
        for b in [1, -2, 3] {
            let mu = bercovici_pata(&bernoulli(b, 6));
            let psi = random_functional(&mut rng, 1, 6);
            let lhs = phi_map(&mu, &psi).unwrap();
            let rhs = phi_one_arg(&boolean_convolve(&psi, &F::delta(&[q(b, 1)], 6)).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bercovici_pata_maps() {
        let mut rng = seeded(7);
        let rho = random_functional(&mut rng, 2, 5);
        let zero = [q(0, 1), q(0, 1)];
        assert_eq!(b_map(&rho, &zero, &q(1, 1)).unwrap(), bercovici_pata(&rho));
        assert_eq!(bercovici_pata(&phi_map(&rho, &F::delta_zero(2, 5)).unwrap()), rho);
        assert_eq!(bercovici_pata_inverse(&bercovici_pata(&rho)), rho);
        assert_eq!(phi_map(&rho, &F::delta_zero(2, 5)).unwrap(), bercovici_pata_inverse(&rho));
        assert_eq!(b_map(&rho, &zero, &q(-1, 1)).unwrap_err(), Error::TimeMinusOne);
        assert!(b_map(&rho, &[q(0, 1)], &q(1, 1)).is_err());
    }

    #[test]
    fn b_map_semigroup() {
        let mut rng = seeded(8);
        let rho = random_functional(&mut rng, 2, 5);
        let (a, b) = ([q(1, 2), q(-1, 1)], [q(2, 1), q(1, 3)]);
        let (t, s) = (q(1, 2), q(1, 3));
        let lhs = b_map(&b_map(&rho, &b, &s).unwrap(), &a, &t).unwrap();
        let ab: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        assert_eq!(lhs, b_map(&rho, &ab, &(t + s)).unwrap());
    }

    #[test]
    fn b_map_oracles() {
        let mut rng = seeded(9);
        let rho = random_functional(&mut rng, 2, 5);
        let a = [q(1, 3), q(-2, 1)];
        let t = q(3, 4);
        let fast = boolean_from_moments(&b_map(&rho, &a, &t).unwrap()).into_series();
        assert_eq!(oracle::b_t_eta_series(&rho, &a, &t).unwrap(), fast);
        let word = w(&[1, 2, 2, 1]);
        assert_eq!(oracle::b_t_eta(&rho, &a, &t, &word).unwrap(), fast.coeff(&word));
        let zero = [q(0, 1), q(0, 1)];
        let id = oracle::b_t_eta_series(&rho, &zero, &q(0, 1)).unwrap();
        assert_eq!(id, boolean_from_moments(&rho).into_series());
        let fast0 = boolean_from_moments(&b_map(&rho, &a, &q(0, 1)).unwrap()).into_series();
        assert_eq!(oracle::formula_b_a(&rho, &a).unwrap(), fast0);
    }

    #[test]
    fn fermi_image_examples() {
        let mut rng = seeded(10);
        let raw = random_functional(&mut rng, 2, 5);
        let centred = translate(&raw, &raw.mean().iter().map(|m| -m.clone()).collect::<Vec<_>>()).unwrap();
        assert_eq!(centred.mean(), vec![q(0, 1), q(0, 1)]);
        assert_eq!(fermi_image(&centred), centred);
        let d1 = F::delta(&[q(1, 1)], 6);
        let img = boolean_from_moments(&fermi_image(&d1)).into_series();
        assert_eq!(img, oracle::formula_b_a(&d1, &[q(1, 1)]).unwrap());
        let img = fermi_image(&raw);
        assert_eq!(img.mean(), raw.mean());
    }

    #[test]
    fn orthogonal_convolution_identities() {
        let mut rng = seeded(11);
        let tau = random_functional(&mut rng, 1, 6);
        let psi = random_functional(&mut rng, 1, 6);
        let a = [q(3, 2)];
        assert_eq!(
            orthogonal_convolve(&tau, &F::delta(&a, 6)).unwrap(),
            b_map(&tau, &a, &q(0, 1)).unwrap()
        );
        let lhs = phi_one_arg(&monotone_convolve(&tau, &psi).unwrap());
        assert_eq!(lhs, orthogonal_convolve(&phi_one_arg(&tau), &psi).unwrap());
        let two = random_functional(&mut rng, 2, 4);
        assert_eq!(orthogonal_convolve(&two, &two).unwrap_err(), Error::SingleVariableOnly { d: 2 });
    }

    #[test]
    fn monotone_phi_in_several_variables() {
        let mut rng = seeded(12);
        let tau = random_functional(&mut rng, 2, 5);
        let psi = random_functional(&mut rng, 2, 5);
        let lhs = phi_one_arg(&monotone_convolve(&tau, &psi).unwrap());
        assert_eq!(lhs, phi_map(&bercovici_pata(&phi_one_arg(&tau)), &psi).unwrap());
    }

    #[test]
    fn symmetric_bernoulli_orthogonal_is_phi() {
        use crate::meixner::{meixner_functional, MeixnerParams};
        let bern = meixner_functional(&MeixnerParams::normalized(q(0, 1), q(-1, 1)), 7);
        for seed in 20..24 {
            let psi = random_functional(&mut seeded(seed), 1, 7);
            assert_eq!(orthogonal_convolve(&bern, &psi).unwrap(), phi_one_arg(&psi));
        }
    }

    #[test]
    fn delta_second_argument() {
        let mut rng = seeded(13);
        let rho = random_functional(&mut rng, 2, 5);
        let a = [q(-1, 2), q(2, 1)];
        let lhs = phi_map(&rho, &F::delta(&a, 5)).unwrap();
        assert_eq!(lhs, b_map(&bercovici_pata_inverse(&rho), &a, &q(0, 1)).unwrap());
    }

    #[test]
    fn recover_psi_round_trip() {
        let mut rng = seeded(14);
        let sigma = random_functional(&mut rng, 2, 5);
        let rho = bercovici_pata(&sigma);
        let psi = random_functional(&mut rng, 2, 5);
        let phi = phi_map(&rho, &psi).unwrap();
        let got = recover_psi(&rho, &phi).unwrap();
        assert_eq!(got.order(), 3);
        assert_eq!(got, psi.truncate(3));
        assert_eq!(recover_psi(&rho, &rho).unwrap(), rho.truncate(3));
        let flat = F::delta(&[q(1, 1), q(2, 1)], 5);
        assert_eq!(recover_psi(&flat, &flat).unwrap_err(), Error::Underdetermined { degree: 1 });
        let mut bad = phi.moments().clone();
        bad.set(&w(&[1, 2, 1, 2, 2]), q(99, 1)).unwrap();
        let bad = F::new(bad).unwrap();
        assert!(matches!(recover_psi(&rho, &bad), Err(Error::NotInImage { degree: 5 })));
    }

    #[test]
    fn evolution_identities() {
        let mut rng = seeded(15);
        let rho = bercovici_pata(&random_functional(&mut rng, 2, 5));
        let psi = random_functional(&mut rng, 2, 5);
        for t in [q(1, 1), q(2, 1), q(1, 2)] {
            let rep = evolution_check(&rho, &psi, &[q(1, 1), q(-1, 1)], &t).unwrap();
            assert!(rep.passed(0.0), "{:?}", rep.first_failure());
        }
        // semicircular case: Phi[psi ⊞ gamma_t] = B_t[Phi[psi]]
        let gamma = standard_semicircular::<Rational>(2, 5);
        let t = q(3, 2);
        let zero = [q(0, 1), q(0, 1)];
        let lhs = phi_one_arg(&free_convolve(&psi, &free_power(&gamma, &t)).unwrap());
        assert_eq!(lhs, b_map(&phi_one_arg(&psi), &zero, &t).unwrap());
    }

    #[test]
    fn evolution_partition_sum() {
        let mut rng = seeded(16);
        let rho = random_functional(&mut rng, 2, 5);
        let psi = random_functional(&mut rng, 2, 5);
        let t = q(2, 3);
        let lhs = phi_map(&rho, &free_convolve(&psi, &free_power(&rho, &t)).unwrap()).unwrap();
        assert_eq!(oracle::evolution_eta(&rho, &psi, &t).unwrap(), boolean_from_moments(&lhs).into_series());
    }

    #[test]
    fn boolean_shift_from_linear_two_state_cumulants() {
        // R^{phi,psi} = sum a_i z_i + beta R^psi  implies  phi = delta_a ⊎ psi^{⊎beta}
        let mut rng = seeded(17);
        let psi = random_functional(&mut rng, 2, 5);
        let a = [q(1, 2), q(-3, 2)];
        let beta = q(2, 3);
        let r = &linear_series(&a, 5) + &free_from_moments(&psi).into_series().scale(&beta);
        let r = CumulantSeries::new(CumulantKind::TwoState, r).unwrap();
        let phi = crate::cumulants::pair_moments_from_two_state(&r, &psi).unwrap();
        assert_eq!(phi, boolean_convolve(&F::delta(&a, 5), &boolean_power(&psi, &beta)).unwrap());
    }

    #[test]
    fn descriptor_dispatch() {
        let mut rng = seeded(18);
        let f = random_functional(&mut rng, 1, 5);
        let g = random_functional(&mut rng, 1, 5);
        let m = MapDescriptor::BMap { a: vec![q(1, 1)], t: q(1, 2) };
        assert_eq!(m.apply(&[&f]).unwrap(), b_map(&f, &[q(1, 1)], &q(1, 2)).unwrap());
        assert_eq!(MapDescriptor::PhiMap.apply(&[&f, &g]).unwrap(), phi_map(&f, &g).unwrap());
        assert!(MapDescriptor::PhiMap.apply(&[&f]).is_err());
        let approx = MapDescriptor::FreePower(q(1, 3)).apply(&[&f.cast::<f64>()]).unwrap();
        let exact: NcSeries<f64> = free_power(&f, &q(1, 3)).moments().map(crate::scalar::cast);
        assert!(approx.moments().max_abs_diff(&exact) < 1e-9);
    }

    #[test]
    fn bernoulli_orthogonal_convolution() {
        // bernoulli(b) ⊢ psi = Phi[psi ⊎ delta_b], whereas B_{b,0}[Phi[psi]] = Phi[psi ⊞ delta_b]
        let mut rng = seeded(19);
        let psi = random_functional(&mut rng, 1, 6);
        let b = [q(2, 1)];
        let lhs = orthogonal_convolve(&bernoulli(2, 6), &psi).unwrap();
        assert_eq!(lhs, phi_one_arg(&boolean_convolve(&psi, &F::delta(&b, 6)).unwrap()));
        let shifted = b_map(&phi_one_arg(&psi), &b, &q(0, 1)).unwrap();
        assert_eq!(shifted, phi_one_arg(&translate(&psi, &b).unwrap()));
        assert_eq!(lhs.moments().first_difference(shifted.moments()).map(|(w, _, _)| w.degree()), Some(5));
    }
}
