//! Moment/cumulant conversions for the Boolean, free and two-state
//! (conditionally free) theories.
//!
//! Every conversion has a generating-function implementation here and an
//! independent partition-sum implementation in [`oracle`].

pub mod oracle;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{mul_into_order, NcSeries, Word};

/// A unital linear functional on non-commutative polynomials, stored by
/// its moments `phi[x_u]` up to degree `N`.
///
/// Nothing here requires positivity; states are the positive ones.
#[derive(Clone, Debug)]
pub struct Functional<T> {
    moments: NcSeries<T>,
}

/// Equality up to the smaller truncation degree.
impl<T: Scalar> PartialEq for Functional<T> {
    fn eq(&self, other: &Self) -> bool {
        self.moments == other.moments
    }
}

impl<T: Scalar> Functional<T> {
    /// Wraps a moment series; the empty-word moment must be 1.
    pub fn new(moments: NcSeries<T>) -> Result<Self> {
        if !moments.constant_term().is_one() {
            return Err(Error::NotUnital);
        }
        Ok(Self { moments })
    }

    /// Builds a functional from a moment closure; the empty word is forced to 1.
    pub fn from_fn(d: usize, order: usize, mut f: impl FnMut(&Word) -> T) -> Self {
        let moments = NcSeries::from_fn(d, order, |w| if w.is_empty() { T::one() } else { f(w) });
        Self { moments }
    }

    /// The multiplicative functional `delta_a[P] = P(a_1, ..., a_d)`.
    pub fn delta(a: &[T], order: usize) -> Self {
        Self::from_fn(a.len(), order, |w| {
            w.letters().iter().fold(T::one(), |acc, &l| acc * a[l - 1].clone())
        })
    }

    /// `delta_0`, the constant-term functional.
    pub fn delta_zero(d: usize, order: usize) -> Self {
        Self { moments: NcSeries::one(d, order) }
    }

    pub fn d(&self) -> usize {
        self.moments.d()
    }

    pub fn order(&self) -> usize {
        self.moments.order()
    }

    /// The moment series `1 + M(z)`.
    pub fn moments(&self) -> &NcSeries<T> {
        &self.moments
    }

    pub fn into_moments(self) -> NcSeries<T> {
        self.moments
    }

    /// `M(z)`, the moment series without its constant term.
    pub fn m_series(&self) -> NcSeries<T> {
        self.moments.without_constant()
    }

    pub fn moment(&self, w: &Word) -> T {
        self.moments.coeff(w)
    }

    /// `(phi[x_1], ..., phi[x_d])`.
    pub fn mean(&self) -> Vec<T> {
        (1..=self.d()).map(|i| self.moments.at(&[i]).clone()).collect()
    }

    /// `phi[x_i x_j] - phi[x_i] phi[x_j]`, row-major.
    pub fn covariance(&self) -> Vec<Vec<T>> {
        let m = self.mean();
        (1..=self.d())
            .map(|i| {
                (1..=self.d())
                    .map(|j| self.moments.at(&[i, j]).clone() - m[i - 1].mul_ref(&m[j - 1]))
                    .collect()
            })
            .collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { moments: self.moments.truncate(order) }
    }

    /// Reversal symmetry `phi[x_u] = phi[x_{reverse u}]`, required of real states.
    pub fn is_reversal_symmetric(&self) -> bool {
        self.moments.is_reversal_symmetric()
    }

    pub fn cast<U: Scalar>(&self) -> Functional<U> {
        Functional { moments: self.moments.map(crate::scalar::cast) }
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.moments.agrees_with(&other.moments)
    }
}

/// Which cumulant family a series holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CumulantKind {
    Boolean,
    Free,
    TwoState,
}

impl CumulantKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Boolean => "boolean",
            Self::Free => "free",
            Self::TwoState => "two-state",
        }
    }
}

/// A cumulant generating function (`eta`, `R` or `R^{phi,psi}`); constant term 0.
#[derive(Clone, Debug)]
pub struct CumulantSeries<T> {
    pub kind: CumulantKind,
    series: NcSeries<T>,
}

impl<T: Scalar> PartialEq for CumulantSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.series == other.series
    }
}

impl<T: Scalar> CumulantSeries<T> {
    pub fn new(kind: CumulantKind, series: NcSeries<T>) -> Result<Self> {
        if !series.constant_term().is_zero() {
            return Err(Error::CumulantConstantTerm);
        }
        Ok(Self { kind, series })
    }

    pub fn series(&self) -> &NcSeries<T> {
        &self.series
    }

    pub fn into_series(self) -> NcSeries<T> {
        self.series
    }

    pub fn d(&self) -> usize {
        self.series.d()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, w: &Word) -> T {
        self.series.coeff(w)
    }

    /// Same coefficients under another kind label.
    pub fn relabel(self, kind: CumulantKind) -> Self {
        Self { kind, ..self }
    }
}

fn check_same_alphabet<T: Scalar>(a: &NcSeries<T>, b: &NcSeries<T>) -> Result<()> {
    if a.d() != b.d() {
        Err(Error::AlphabetMismatch { left: a.d(), right: b.d() })
    } else {
        Ok(())
    }
}

/// The substitution `z_i = (1 + M(w)) w_i` for a moment series `1 + M`.
pub fn shifted_variables<T: Scalar>(moments: &NcSeries<T>) -> Vec<NcSeries<T>> {
    let (d, order) = (moments.d(), moments.order());
    (1..=d)
        .map(|i| {
            let z = NcSeries::var(d, order, i).expect("index in range");
            // (1+M) known to N, times a degree-1 monomial: determined to N
            mul_into_order(moments, &z, order)
        })
        .collect()
}

/// `(1 + M^psi(w))^{-1} R((1 + M^psi(w)) w)`.
pub fn conjugated_composition<T: Scalar>(r: &NcSeries<T>, psi_moments: &NcSeries<T>) -> Result<NcSeries<T>> {
    check_same_alphabet(r, psi_moments)?;
    let inner = r.substitute(&shifted_variables(psi_moments))?;
    Ok(&psi_moments.reciprocal()? * &inner)
}

/// Solves `R((1 + M^psi(w)) w) = target(w)` for `R` with zero constant term.
///
/// At degree `n` the unknown coefficients enter with unit coefficient, so
/// each degree is peeled off after subtracting the contribution of the
/// lower-degree part of `R`.
fn solve_shifted_composition<T: Scalar>(target: &NcSeries<T>, psi_moments: &NcSeries<T>) -> NcSeries<T> {
    let d = target.d();
    let order = target.order().min(psi_moments.order());
    let subs_full = shifted_variables(&psi_moments.truncate(order));
    let mut r = NcSeries::zero(d, order);
    for n in 1..=order {
        let subs: Vec<_> = subs_full.iter().map(|s| s.truncate(n)).collect();
        let known = r.truncate(n).substitute(&subs).expect("alphabets checked");
        let (lo, hi) = (crate::series::offset(d, n), crate::series::offset(d, n + 1));
        for idx in lo..hi {
            r.raw_mut()[idx] = target.raw()[idx].clone() - known.raw()[idx].clone();
        }
    }
    r
}

/// Boolean cumulants: `eta = 1 - (1 + M)^{-1}`.
pub fn boolean_from_moments<T: Scalar>(f: &Functional<T>) -> CumulantSeries<T> {
    let inv = f.moments.reciprocal().expect("unital");
    let eta = &NcSeries::one(f.d(), f.order()) - &inv;
    CumulantSeries { kind: CumulantKind::Boolean, series: eta }
}

/// Inverse of [`boolean_from_moments`]: `1 + M = (1 - eta)^{-1}`.
pub fn moments_from_boolean<T: Scalar>(e: &CumulantSeries<T>) -> Functional<T> {
    let one = NcSeries::one(e.d(), e.order());
    let moments = (&one - &e.series).reciprocal().expect("unit constant term");
    Functional { moments }
}

/// Free cumulants: the unique `R` with `M(w) = R((1 + M(w)) w)`.
pub fn free_from_moments<T: Scalar>(f: &Functional<T>) -> CumulantSeries<T> {
    let r = solve_shifted_composition(&f.m_series(), &f.moments);
    CumulantSeries { kind: CumulantKind::Free, series: r }
}

/// Inverse of [`free_from_moments`], by iterating `M <- R((1 + M) w)` one
/// degree at a time.
pub fn moments_from_free<T: Scalar>(r: &CumulantSeries<T>) -> Functional<T> {
    let (d, order) = (r.d(), r.order());
    let mut moments = NcSeries::one(d, order);
    for n in 1..=order {
        let subs: Vec<_> = shifted_variables(&moments.truncate(n));
        let next = r.series.truncate(n).substitute(&subs).expect("alphabets checked");
        let (lo, hi) = (crate::series::offset(d, n), crate::series::offset(d, n + 1));
        for idx in lo..hi {
            moments.raw_mut()[idx] = next.raw()[idx].clone();
        }
    }
    Functional { moments }
}

/// Two-state cumulants `R^{phi,psi}`, defined through
/// `eta^phi(w) = (1 + M^psi(w))^{-1} R^{phi,psi}((1 + M^psi(w)) w)`.
pub fn two_state_from_pair<T: Scalar>(phi: &Functional<T>, psi: &Functional<T>) -> Result<CumulantSeries<T>> {
    check_same_alphabet(&phi.moments, &psi.moments)?;
    let eta = boolean_from_moments(phi).series;
    let target = &psi.moments * &eta;
    let r = solve_shifted_composition(&target, &psi.moments);
    Ok(CumulantSeries { kind: CumulantKind::TwoState, series: r })
}

/// The unique `phi` whose two-state cumulants relative to `psi` are `r`.
pub fn pair_moments_from_two_state<T: Scalar>(r: &CumulantSeries<T>, psi: &Functional<T>) -> Result<Functional<T>> {
    if !r.series.constant_term().is_zero() {
        return Err(Error::CumulantConstantTerm);
    }
    let eta = conjugated_composition(&r.series, &psi.moments)?;
    Ok(moments_from_boolean(&CumulantSeries { kind: CumulantKind::Boolean, series: eta }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_functional, seeded};
    use crate::scalar::{q, Rational};

    type F = Functional<Rational>;
    type S = NcSeries<Rational>;

    fn w(l: &[usize]) -> Word {
        Word::new(l.to_vec())
    }

    fn one_var(moments: &[Rational]) -> F {
        F::from_fn(1, moments.len() - 1, |w| moments[w.degree()].clone())
    }

    fn catalan(n: usize) -> i64 {
        (0..n).fold(1i64, |c, k| c * 2 * (2 * k as i64 + 1) / (k as i64 + 2))
    }

    fn bernoulli(order: usize) -> F {
        one_var(&(0..=order).map(|n| q((n % 2 == 0) as i64, 1)).collect::<Vec<_>>())
    }

    fn semicircle(d: usize, order: usize) -> F {
        let r = S::from_terms(d, order, (1..=d).map(|i| (w(&[i, i]), q(1, 1)))).unwrap();
        moments_from_free(&CumulantSeries::new(CumulantKind::Free, r).unwrap())
    }

    #[test]
    fn functional_must_be_unital() {
        assert_eq!(F::new(S::zero(1, 3)).unwrap_err(), Error::NotUnital);
        assert!(F::new(S::one(2, 3)).is_ok());
    }

    #[test]
    fn boolean_cumulants_of_bernoulli() {
        let eta = boolean_from_moments(&bernoulli(8));
        assert_eq!(eta.series(), &S::from_terms(1, 8, [(w(&[1, 1]), q(1, 1))]).unwrap());
        assert_eq!(moments_from_boolean(&eta), bernoulli(8));
    }

    #[test]
    fn delta_cumulants_are_linear() {
        let a = q(3, 2);
        let delta = F::delta(&[a.clone()], 7);
        let lin = S::from_terms(1, 7, [(w(&[1]), a)]).unwrap();
        assert_eq!(boolean_from_moments(&delta).series(), &lin);
        assert_eq!(free_from_moments(&delta).series(), &lin);
        let zero = F::delta_zero(2, 4);
        assert!(boolean_from_moments(&zero).series().is_zero());
        assert!(free_from_moments(&zero).series().is_zero());
        assert_eq!(moments_from_free(&CumulantSeries::new(CumulantKind::Free, S::zero(2, 4)).unwrap()), zero);
    }

    #[test]
    fn semicircle_moments_are_catalan() {
        let sc = semicircle(1, 10);
        for n in 0..=5 {
            assert_eq!(sc.moment(&w(&vec![1; 2 * n])), q(catalan(n), 1));
            assert_eq!(sc.moment(&w(&vec![1; 2 * n - (n > 0) as usize])), q((n == 0) as i64, 1));
        }
        let r = free_from_moments(&sc);
        assert_eq!(r.series(), &S::from_terms(1, 10, [(w(&[1, 1]), q(1, 1))]).unwrap());
    }

    #[test]
    fn two_colour_semicircle() {
        let sc = semicircle(2, 4);
        assert_eq!(sc.moment(&w(&[1, 2, 2, 1])), q(1, 1));
        assert_eq!(sc.moment(&w(&[1, 2, 1, 2])), q(0, 1));
    }

    #[test]
    fn low_order_free_cumulants() {
        let mut rng = seeded(7);
        let f = random_functional(&mut rng, 1, 3);
        let m = |n: usize| f.moment(&w(&vec![1; n]));
        let r = free_from_moments(&f);
        assert_eq!(r.coeff(&w(&[1])), m(1));
        assert_eq!(r.coeff(&w(&[1, 1])), m(2) - m(1) * m(1));
        assert_eq!(
            r.coeff(&w(&[1, 1, 1])),
            m(3) - q(3, 1) * m(1) * m(2) + q(2, 1) * m(1) * m(1) * m(1)
        );
    }

    #[test]
    fn degree_one_and_two_agree_across_kinds() {
        let mut rng = seeded(11);
        for d in 1..=3 {
            let phi = random_functional(&mut rng, d, 4);
            let psi = random_functional(&mut rng, d, 4);
            let kinds = [
                boolean_from_moments(&phi),
                free_from_moments(&phi),
                two_state_from_pair(&phi, &psi).unwrap(),
            ];
            for c in kinds {
                for i in 1..=d {
                    assert_eq!(c.coeff(&w(&[i])), phi.moment(&w(&[i])));
                    for j in 1..=d {
                        let expect = phi.moment(&w(&[i, j])) - phi.moment(&w(&[i])) * phi.moment(&w(&[j]));
                        assert_eq!(c.coeff(&w(&[i, j])), expect, "{:?}", c.kind);
                    }
                }
            }
        }
    }

    #[test]
    fn round_trips() {
        let mut rng = seeded(3);
        for d in 1..=3 {
            let phi = random_functional(&mut rng, d, 5);
            let psi = random_functional(&mut rng, d, 5);
            assert_eq!(moments_from_boolean(&boolean_from_moments(&phi)), phi);
            assert_eq!(moments_from_free(&free_from_moments(&phi)), phi);
            let r = two_state_from_pair(&phi, &psi).unwrap();
            assert_eq!(pair_moments_from_two_state(&r, &psi).unwrap(), phi);
        }
    }

    #[test]
    fn two_state_specializations() {
        let mut rng = seeded(5);
        let phi = random_functional(&mut rng, 2, 5);
        let r_self = two_state_from_pair(&phi, &phi).unwrap();
        assert_eq!(r_self.series(), free_from_moments(&phi).series());
        let r_bool = two_state_from_pair(&phi, &F::delta_zero(2, 5)).unwrap();
        assert_eq!(r_bool.series(), boolean_from_moments(&phi).series());
        assert!(two_state_from_pair(&phi, &F::delta_zero(3, 5)).is_err());
    }

    #[test]
    fn pair_moments_specializations() {
        let mut rng = seeded(9);
        let psi = random_functional(&mut rng, 2, 5);
        let r = free_from_moments(&psi).relabel(CumulantKind::TwoState);
        assert_eq!(pair_moments_from_two_state(&r, &psi).unwrap(), psi);
        let phi0 = random_functional(&mut rng, 2, 5);
        let eta = boolean_from_moments(&phi0).relabel(CumulantKind::TwoState);
        assert_eq!(pair_moments_from_two_state(&eta, &F::delta_zero(2, 5)).unwrap(), phi0);
    }

    #[test]
    fn c_free_product_rule_for_three_letters() {
        // a = x1, b = x2, c = x1 with {x1} c-free from {x2}:
        // phi[abc] = phi[a]phi[b]phi[c] + (phi[ac] - phi[a]phi[c]) psi[b]
        let mut rng = seeded(13);
        let psi = random_functional(&mut rng, 2, 3);
        let (a1, a2, b1, v) = (q(2, 3), q(-1, 2), q(5, 4), q(3, 1));
        // R^{phi,psi} vanishes on mixed words
        let r = S::from_terms(
            2,
            3,
            [(w(&[1]), a1.clone()), (w(&[2]), b1.clone()), (w(&[1, 1]), v.clone()), (w(&[1, 1, 1]), a2)],
        )
        .unwrap();
        let phi = pair_moments_from_two_state(&CumulantSeries::new(CumulantKind::TwoState, r).unwrap(), &psi).unwrap();
        let lhs = phi.moment(&w(&[1, 2, 1]));
        let rhs = phi.moment(&w(&[1])) * phi.moment(&w(&[2])) * phi.moment(&w(&[1]))
            + (phi.moment(&w(&[1, 1])) - phi.moment(&w(&[1])) * phi.moment(&w(&[1]))) * psi.moment(&w(&[2]));
        assert_eq!(lhs, rhs);
        assert_eq!(phi.moment(&w(&[1, 2])), phi.moment(&w(&[1])) * phi.moment(&w(&[2])));
    }

    #[test]
    fn reversal_symmetry_is_inherited() {
        let mut rng = seeded(17);
        let raw = random_functional(&mut rng, 2, 5);
        let sym = F::from_fn(2, 5, |u| {
            (raw.moment(u) + raw.moment(&u.reversed())) / q(2, 1)
        });
        let psi_raw = random_functional(&mut rng, 2, 5);
        let psi = F::from_fn(2, 5, |u| (psi_raw.moment(u) + psi_raw.moment(&u.reversed())) / q(2, 1));
        assert!(sym.is_reversal_symmetric());
        assert!(boolean_from_moments(&sym).series().is_reversal_symmetric());
        assert!(free_from_moments(&sym).series().is_reversal_symmetric());
        assert!(two_state_from_pair(&sym, &psi).unwrap().series().is_reversal_symmetric());
    }

    #[test]
    fn float_and_rational_paths_agree() {
        let mut rng = seeded(19);
        let phi = random_functional(&mut rng, 2, 5);
        let exact = free_from_moments(&phi);
        let approx = free_from_moments(&phi.cast::<f64>());
        let back: NcSeries<f64> = exact.series().map(crate::scalar::cast);
        assert!(approx.series().max_abs_diff(&back) < 1e-9);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::random::{random_functional, seeded};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conversions_round_trip(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = seeded(seed);
            let phi = random_functional(&mut rng, d, 4);
            let psi = random_functional(&mut rng, d, 4);
            prop_assert_eq!(moments_from_boolean(&boolean_from_moments(&phi)), phi.clone());
            prop_assert_eq!(moments_from_free(&free_from_moments(&phi)), phi.clone());
            let r = two_state_from_pair(&phi, &psi).unwrap();
            prop_assert_eq!(pair_moments_from_two_state(&r, &psi).unwrap(), phi);
        }

        #[test]
        fn generating_functions_match_partition_sums(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = seeded(seed);
            let phi = random_functional(&mut rng, d, 4);
            let psi = random_functional(&mut rng, d, 4);
            prop_assert_eq!(boolean_from_moments(&phi), oracle::boolean_from_moments(&phi).unwrap());
            prop_assert_eq!(free_from_moments(&phi), oracle::free_from_moments(&phi).unwrap());
            prop_assert_eq!(two_state_from_pair(&phi, &psi).unwrap(), oracle::two_state_from_pair(&phi, &psi).unwrap());
        }

        #[test]
        fn low_degrees_are_mean_and_covariance(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = seeded(seed);
            let phi = random_functional(&mut rng, d, 4);
            let psi = random_functional(&mut rng, d, 4);
            let mean = phi.mean();
            let cov = phi.covariance();
            let kinds: [CumulantSeries<Rational>; 3] =
                [boolean_from_moments(&phi), free_from_moments(&phi), two_state_from_pair(&phi, &psi).unwrap()];
            for k in &kinds {
                for i in 0..d {
                    prop_assert_eq!(k.coeff(&Word::new(vec![i + 1])), mean[i].clone());
                    for j in 0..d {
                        prop_assert_eq!(k.coeff(&Word::new(vec![i + 1, j + 1])), cov[i][j].clone());
                    }
                }
            }
        }

        #[test]
        fn reversal_symmetry_passes_to_cumulants(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = seeded(seed);
            let raw = random_functional(&mut rng, d, 4);
            let sym = Functional::from_fn(d, 4, |w| (raw.moment(w) + raw.moment(&w.reversed())) / Rational::from_int(2));
            prop_assert!(boolean_from_moments(&sym).series().is_reversal_symmetric());
            prop_assert!(free_from_moments(&sym).series().is_reversal_symmetric());
        }
    }
}
