//! Partition and subset sums for Boolean cumulants of transformed
//! functionals, used to cross-check the generating-function maps.

use crate::cumulants::{boolean_from_moments, free_from_moments, Functional};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_nc_prime, SetPartition};
use crate::scalar::Scalar;
use crate::series::{NcSeries, Word};

fn pick(letters: &[usize], positions: &[usize]) -> Vec<usize> {
    positions.iter().map(|&i| letters[i - 1]).collect()
}

fn pow<T: Scalar>(t: &T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, _| acc * t.clone())
}

fn check_word(d: usize, order: usize, w: &Word) -> Result<()> {
    if w.degree() > order {
        return Err(Error::DegreeTooLarge { degree: w.degree(), order });
    }
    if let Some(&l) = w.letters().iter().find(|&&l| l == 0 || l > d) {
        return Err(Error::LetterOutOfRange { letter: l, d });
    }
    Ok(())
}

fn series_from<T: Scalar>(d: usize, order: usize, mut f: impl FnMut(&Word) -> Result<T>) -> Result<NcSeries<T>> {
    let mut s = NcSeries::zero(d, order);
    for w in Word::all(d, order).filter(|w| !w.is_empty()) {
        let c = f(&w)?;
        s.set(&w, c)?;
    }
    Ok(s)
}

struct BtOracle<T> {
    eta: NcSeries<T>,
    parts: Vec<Vec<SetPartition>>,
}

impl<T: Scalar> BtOracle<T> {
    fn new(rho: &Functional<T>) -> Result<Self> {
        let parts = (0..=rho.order()).map(|n| if n == 0 { Ok(vec![]) } else { enumerate_nc_prime(n) }).collect::<Result<_>>()?;
        Ok(Self { eta: boolean_from_moments(rho).into_series(), parts })
    }

    fn eval(&self, a: &[T], t: &T, w: &Word) -> T {
        let u = w.letters();
        let n = u.len();
        if n == 1 {
            return self.eta.at(u).clone();
        }
        let mut total = T::zero();
        for pi in &self.parts[n] {
            let sing = pi.singleton_blocks();
            let others: Vec<&Vec<usize>> = pi.blocks().iter().filter(|b| b.len() > 1).collect();
            for mask in 0u64..(1 << sing.len()) {
                let mut term = T::one();
                let mut complement = others.len();
                for (k, &i) in sing.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        term *= a[u[i - 1] - 1].clone();
                    } else {
                        complement += 1;
                        term *= self.eta.at(&[u[i - 1]]).clone();
                    }
                }
                for b in &others {
                    term *= self.eta.at(&pick(u, b)).clone();
                }
                total += term * pow(t, complement - 1);
            }
        }
        total
    }
}

/// `eta^{B_{a,t}[rho]}[x_u]` as a sum over `pi in NC'(n)` and subsets `S` of
/// the singletons of `pi`: singletons in `S` contribute `a_{u(i)}`, every
/// other block `B` contributes `eta^rho[x_u|B]`, with weight `t^{|pi \ S| - 1}`.
pub fn b_t_eta<T: Scalar>(rho: &Functional<T>, a: &[T], t: &T, w: &Word) -> Result<T> {
    check_word(rho.d(), rho.order(), w)?;
    if w.is_empty() {
        return Ok(T::zero());
    }
    Ok(BtOracle::new(&rho.truncate(w.degree()))?.eval(a, t, w))
}

/// [`b_t_eta`] for every word up to the truncation degree.
pub fn b_t_eta_series<T: Scalar>(rho: &Functional<T>, a: &[T], t: &T) -> Result<NcSeries<T>> {
    if a.len() != rho.d() {
        return Err(Error::AlphabetMismatch { left: rho.d(), right: a.len() });
    }
    let o = BtOracle::new(rho)?;
    series_from(rho.d(), rho.order(), |w| Ok(o.eval(a, t, w)))
}

/// Subsets of `{1..n}` containing both endpoints, as sorted 1-based lists.
fn endpoint_subsets(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let inner = n - 2;
    (0u64..(1 << inner))
        .map(|mask| {
            let mut s = vec![1];
            s.extend((0..inner).filter(|k| mask >> k & 1 == 1).map(|k| k + 2));
            s.push(n);
            s
        })
        .collect()
}

/// `eta^{B_{a,0}[rho]}` by the subset expansion: sum over `Lambda ⊇ {1, n}` of
/// `prod_{i not in Lambda} a_{u(i)} * eta^rho[x_u|Lambda]`.
pub fn formula_b_a<T: Scalar>(rho: &Functional<T>, a: &[T]) -> Result<NcSeries<T>> {
    if a.len() != rho.d() {
        return Err(Error::AlphabetMismatch { left: rho.d(), right: a.len() });
    }
    let eta = boolean_from_moments(rho).into_series();
    series_from(rho.d(), rho.order(), |w| {
        let u = w.letters();
        let mut total = T::zero();
        for lam in endpoint_subsets(u.len()) {
            let mut term = eta.at(&pick(u, &lam)).clone();
            for i in (1..=u.len()).filter(|i| !lam.contains(i)) {
                term *= a[u[i - 1] - 1].clone();
            }
            total += term;
        }
        Ok(total)
    })
}

/// `eta^{Phi[rho, psi]}` from the defining expansion: sum over
/// `Lambda = {1 = v_0 < ... < v_k = n}` of `R^rho[x_u|Lambda]` times the
/// `psi`-moments of the gaps between consecutive elements of `Lambda`.
pub fn phi_eta<T: Scalar>(rho: &Functional<T>, psi: &Functional<T>) -> Result<NcSeries<T>> {
    if rho.d() != psi.d() {
        return Err(Error::AlphabetMismatch { left: rho.d(), right: psi.d() });
    }
    let order = rho.order().min(psi.order());
    let r = free_from_moments(&rho.truncate(order)).into_series();
    series_from(rho.d(), order, |w| {
        let u = w.letters();
        let mut total = T::zero();
        for lam in endpoint_subsets(u.len()) {
            let mut term = r.at(&pick(u, &lam)).clone();
            for pair in lam.windows(2) {
                let gap: Vec<usize> = (pair[0] + 1..pair[1]).collect();
                term *= psi.moments().at(&pick(u, &gap)).clone();
            }
            total += term;
        }
        Ok(total)
    })
}

/// `eta^{Phi[rho, psi ⊞ rho^{⊞t}]}` as a sum over `pi in NC'(n)` and block
/// sets `V` containing the outer block: blocks in `V` carry `R^rho`, the rest
/// carry `R^psi`, with weight `t^{|V| - 1}`.
pub fn evolution_eta<T: Scalar>(rho: &Functional<T>, psi: &Functional<T>, t: &T) -> Result<NcSeries<T>> {
    if rho.d() != psi.d() {
        return Err(Error::AlphabetMismatch { left: rho.d(), right: psi.d() });
    }
    let order = rho.order().min(psi.order());
    let r_rho = free_from_moments(&rho.truncate(order)).into_series();
    let r_psi = free_from_moments(&psi.truncate(order)).into_series();
    let parts: Vec<Vec<SetPartition>> =
        (0..=order).map(|n| if n == 0 { Ok(vec![]) } else { enumerate_nc_prime(n) }).collect::<Result<_>>()?;
    series_from(rho.d(), order, |w| {
        let u = w.letters();
        let mut total = T::zero();
        for pi in &parts[u.len()] {
            let (outer, inner) = pi.classify_blocks()?;
            debug_assert_eq!(outer.len(), 1);
            let head = r_rho.at(&pick(u, &outer[0])).clone();
            // each inner block independently joins V (weight t R^rho) or not (R^psi)
            let mut term = head;
            for b in &inner {
                let letters = pick(u, b);
                term *= t.mul_ref(r_rho.at(&letters)) + r_psi.at(&letters).clone();
            }
            total += term;
        }
        Ok(total)
    })
}
