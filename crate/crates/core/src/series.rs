//! Truncated formal power series in `d` non-commuting indeterminates.
//!
//! A series of truncation degree `N` knows its coefficients on every word of
//! degree at most `N`; nothing is claimed beyond. Binary operations combine
//! truncation degrees by `min`, so "equal up to degree N" is the only notion
//! of equality.
//!
//! Coefficients are stored densely, one block per degree, with words of a
//! given degree laid out in base-`d` lexicographic order. The layout is
//! prefix-stable: the coefficients of degree `<= m` occupy the first
//! `size(d, m)` slots whatever the truncation degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A word `u(1) u(2) ... u(n)` over the alphabet `1..=d`.
///
/// Letters are 1-based. The empty word has degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a word and checks every letter lies in `1..=d`.
    pub fn checked(letters: Vec<usize>, d: usize) -> Result<Self> {
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l > d) {
            return Err(Error::LetterOutOfRange { letter, d });
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self { letters: self.letters.iter().rev().copied().collect() }
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    /// The subword on the given 0-based positions.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self { letters: positions.iter().map(|&p| self.letters[p]).collect() }
    }

    /// All words over `1..=d` of degree `<= max_degree`, ordered by
    /// (degree, lexicographic).
    pub fn all(d: usize, max_degree: usize) -> impl Iterator<Item = Word> {
        (0..size(d, max_degree)).map(move |idx| word_at(d, idx))
    }

    /// All words of exactly the given degree, lexicographically.
    pub fn of_degree(d: usize, degree: usize) -> impl Iterator<Item = Word> {
        let start = offset(d, degree);
        (0..d.pow(degree as u32)).map(move |r| word_at(d, start + r))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Word {
    fn from(letters: Vec<usize>) -> Self {
        Self::new(letters)
    }
}

impl From<&[usize]> for Word {
    fn from(letters: &[usize]) -> Self {
        Self::new(letters.to_vec())
    }
}

/// Index of the first word of degree `n`.
pub(crate) fn offset(d: usize, n: usize) -> usize {
    if d == 1 {
        n
    } else {
        (d.pow(n as u32) - 1) / (d - 1)
    }
}

/// Number of words of degree `<= n`.
pub(crate) fn size(d: usize, n: usize) -> usize {
    offset(d, n + 1)
}

/// Dense index of a word given by 1-based letters.
pub(crate) fn index_of(d: usize, letters: &[usize]) -> usize {
    let rank = letters.iter().fold(0usize, |acc, &l| acc * d + (l - 1));
    offset(d, letters.len()) + rank
}

fn word_at(d: usize, idx: usize) -> Word {
    let mut n = 0;
    while offset(d, n + 1) <= idx {
        n += 1;
    }
    let mut rank = idx - offset(d, n);
    let mut letters = vec![0; n];
    for slot in letters.iter_mut().rev() {
        *slot = rank % d + 1;
        rank /= d;
    }
    Word { letters }
}

/// Truncated non-commutative power series with coefficients in `T`.
#[derive(Clone, Debug)]
pub struct NcSeries<T> {
    d: usize,
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> NcSeries<T> {
    /// The zero series. Panics if `d == 0`.
    pub fn zero(d: usize, order: usize) -> Self {
        assert!(d > 0, "alphabet size must be positive");
        Self { d, order, coeffs: vec![T::zero(); size(d, order)] }
    }

    pub fn constant(d: usize, order: usize, c: T) -> Self {
        let mut s = Self::zero(d, order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(d: usize, order: usize) -> Self {
        Self::constant(d, order, T::one())
    }

    /// The indeterminate `z_i` (1-based).
    pub fn var(d: usize, order: usize, i: usize) -> Result<Self> {
        Self::monomial(d, order, &Word::checked(vec![i], d)?, T::one())
    }

    pub fn monomial(d: usize, order: usize, word: &Word, c: T) -> Result<Self> {
        let mut s = Self::zero(d, order);
        s.set(word, c)?;
        Ok(s)
    }

    /// Builds a series from `(word, coefficient)` pairs; repeated words add.
    pub fn from_terms<I>(d: usize, order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, T)>,
    {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut s = Self::zero(d, order);
        for (w, c) in terms {
            let idx = s.checked_index(&w)?;
            s.coeffs[idx] += c;
        }
        Ok(s)
    }

    /// Builds a series from a closure evaluated on every word.
    pub fn from_fn(d: usize, order: usize, mut f: impl FnMut(&Word) -> T) -> Self {
        let coeffs = Word::all(d, order).map(|w| f(&w)).collect();
        Self { d, order, coeffs }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Truncation degree `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    fn checked_index(&self, w: &Word) -> Result<usize> {
        if w.degree() > self.order {
            return Err(Error::DegreeTooLarge { degree: w.degree(), order: self.order });
        }
        if let Some(&letter) = w.letters().iter().find(|&&l| l == 0 || l > self.d) {
            return Err(Error::LetterOutOfRange { letter, d: self.d });
        }
        Ok(index_of(self.d, w.letters()))
    }

    /// Coefficient of a word, or `None` if the word is unknown to this
    /// series (degree above `N` or letter out of range).
    pub fn get(&self, w: &Word) -> Option<&T> {
        self.checked_index(w).ok().map(|i| &self.coeffs[i])
    }

    /// Coefficient of a word. Panics if the word is not covered.
    pub fn coeff(&self, w: &Word) -> T {
        self.get(w)
            .unwrap_or_else(|| panic!("word {w} not covered by series (d={}, N={})", self.d, self.order))
            .clone()
    }

    /// Coefficient addressed by 1-based letters.
    pub fn at(&self, letters: &[usize]) -> &T {
        &self.coeffs[index_of(self.d, letters)]
    }

    pub fn set(&mut self, w: &Word, c: T) -> Result<()> {
        let idx = self.checked_index(w)?;
        self.coeffs[idx] = c;
        Ok(())
    }

    pub fn constant_term(&self) -> &T {
        &self.coeffs[0]
    }

    pub(crate) fn raw(&self) -> &[T] {
        &self.coeffs
    }

    pub(crate) fn raw_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    /// Nonzero terms in canonical (degree, lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (Word, &T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (word_at(self.d, i), c))
    }

    /// Every covered word with its coefficient, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (Word, &T)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (word_at(self.d, i), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Restricts to degree `<= order` (never extends).
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self { d: self.d, order, coeffs: self.coeffs[..size(self.d, order)].to_vec() }
    }

    /// Same coefficients, declared known up to a larger degree with zeros.
    /// Only valid when the caller knows the higher coefficients vanish.
    pub fn extend_with_zeros(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(size(self.d, order.max(self.order)), T::zero());
        Self { d: self.d, order: order.max(self.order), coeffs }
    }

    /// The homogeneous part of degree `n`.
    pub fn degree_part(&self, n: usize) -> Self {
        let mut out = Self::zero(self.d, self.order);
        if n <= self.order {
            let (a, b) = (offset(self.d, n), offset(self.d, n + 1));
            out.coeffs[a..b].clone_from_slice(&self.coeffs[a..b]);
        }
        out
    }

    /// The series with the constant term removed.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = T::zero();
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> NcSeries<U> {
        NcSeries { d: self.d, order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Reverses every word: `z_{u(1)}...z_{u(n)} -> z_{u(n)}...z_{u(1)}`.
    pub fn reversed(&self) -> Self {
        Self::from_fn(self.d, self.order, |w| self.at(&w.reversed().letters).clone())
    }

    pub fn is_reversal_symmetric(&self) -> bool {
        Word::all(self.d, self.order).all(|w| self.at(w.letters()) == self.at(&w.reversed().letters))
    }

    fn check_alphabet(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            Err(Error::AlphabetMismatch { left: self.d, right: other.d })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let order = self.order.min(other.order);
        let coeffs = (0..size(self.d, order))
            .map(|i| self.coeffs[i].clone() + other.coeffs[i].clone())
            .collect();
        Ok(Self { d: self.d, order, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let order = self.order.min(other.order);
        let coeffs = (0..size(self.d, order))
            .map(|i| self.coeffs[i].clone() - other.coeffs[i].clone())
            .collect();
        Ok(Self { d: self.d, order, coeffs })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    /// Cauchy product by word concatenation, truncated at the smaller `N`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        Ok(mul_into_order(self, other, self.order.min(other.order)))
    }

    /// `b` with `a b = b a = 1` up to degree `N`.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let d = self.d;
        let inv = T::one() / c0.clone();
        let mut b = Self::zero(d, self.order);
        b.coeffs[0] = inv.clone();
        let neg_inv = -inv;
        for n in 1..=self.order {
            let off_n = offset(d, n);
            for r in 0..d.pow(n as u32) {
                let mut sum = T::zero();
                for k in 1..=n {
                    let pm = d.pow((n - k) as u32);
                    let ac = &self.coeffs[offset(d, k) + r / pm];
                    if ac.is_zero() {
                        continue;
                    }
                    sum += ac.mul_ref(&b.coeffs[offset(d, n - k) + r % pm]);
                }
                b.coeffs[off_n + r] = neg_inv.mul_ref(&sum);
            }
        }
        Ok(b)
    }

    /// Left partial derivative: `D_i z_u = [u(1) = i] z_{u(2)}...z_{u(n)}`.
    ///
    /// The result is known one degree less than the input (degree 0 stays 0).
    pub fn left_derivative(&self, i: usize) -> Result<Self> {
        if i == 0 || i > self.d {
            return Err(Error::LetterOutOfRange { letter: i, d: self.d });
        }
        let d = self.d;
        let order = self.order.saturating_sub(1);
        let mut out = Self::zero(d, order);
        if self.order == 0 {
            return Ok(out);
        }
        for n in 0..=order {
            let pn = d.pow(n as u32);
            let src = offset(d, n + 1) + (i - 1) * pn;
            let dst = offset(d, n);
            out.coeffs[dst..dst + pn].clone_from_slice(&self.coeffs[src..src + pn]);
        }
        Ok(out)
    }

    /// Replaces `z_i` by `subs[i]` in every word, keeping the order of
    /// factors. Every substituent must have zero constant term.
    pub fn substitute(&self, subs: &[NcSeries<T>]) -> Result<Self> {
        if subs.len() != self.d {
            return Err(Error::SubstitutionArity { expected: self.d, got: subs.len() });
        }
        let d_out = subs[0].d;
        let mut order = self.order;
        for (k, s) in subs.iter().enumerate() {
            if s.d != d_out {
                return Err(Error::AlphabetMismatch { left: d_out, right: s.d });
            }
            if !s.coeffs[0].is_zero() {
                return Err(Error::NonzeroConstantTerm { index: k + 1 });
            }
            order = order.min(s.order);
        }
        // truncated[m][i]: substituent i known to degree m
        let truncated: Vec<Vec<NcSeries<T>>> =
            (0..=order).map(|m| subs.iter().map(|s| s.truncate(m)).collect()).collect();
        let live = self.live_subtrees(order);
        let sub = Substitution { src: self, truncated: &truncated, live: &live, d_out };
        Ok(sub.eval(0, 0, order))
    }

    /// `live[idx]`: some coefficient at or below this node of the word trie
    /// (down to degree `order`) is nonzero.
    fn live_subtrees(&self, order: usize) -> Vec<bool> {
        let d = self.d;
        let mut live: Vec<bool> = self.coeffs[..size(d, order)].iter().map(|c| !c.is_zero()).collect();
        for n in (0..order).rev() {
            for r in 0..d.pow(n as u32) {
                let child = offset(d, n + 1) + r * d;
                if live[child..child + d].iter().any(|&b| b) {
                    live[offset(d, n) + r] = true;
                }
            }
        }
        live
    }

    /// Coefficient-wise agreement up to the smaller truncation degree.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none() && self.d == other.d
    }

    /// First word (canonical order) on which the two series differ, with
    /// both coefficients.
    pub fn first_difference(&self, other: &Self) -> Option<(Word, T, T)> {
        if self.d != other.d {
            return Some((Word::empty(), self.coeffs[0].clone(), other.coeffs[0].clone()));
        }
        let m = size(self.d, self.order.min(other.order));
        (0..m)
            .find(|&i| self.coeffs[i] != other.coeffs[i])
            .map(|i| (word_at(self.d, i), self.coeffs[i].clone(), other.coeffs[i].clone()))
    }

    /// All differing words up to the smaller truncation degree.
    pub fn differences(&self, other: &Self) -> Vec<(Word, T)> {
        let m = size(self.d, self.order.min(other.order));
        (0..m)
            .filter(|&i| self.coeffs[i] != other.coeffs[i])
            .map(|i| (word_at(self.d, i), self.coeffs[i].clone() - other.coeffs[i].clone()))
            .collect()
    }

    /// Largest absolute coefficient difference, as `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let m = size(self.d, self.order.min(other.order));
        (0..m)
            .map(|i| (self.coeffs[i].clone() - other.coeffs[i].clone()).abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// Largest absolute coefficient, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs().to_f64_lossy()).fold(0.0, f64::max)
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        (0..=self.order).find(|&n| {
            self.coeffs[offset(self.d, n)..offset(self.d, n + 1)].iter().any(|c| !c.is_zero())
        })
    }
}

/// Product truncated at an explicit degree. Coefficients beyond either
/// operand's truncation are read as zero, so callers must only ask for
/// degrees the product actually determines.
pub(crate) fn mul_into_order<T: Scalar>(a: &NcSeries<T>, b: &NcSeries<T>, order: usize) -> NcSeries<T> {
    let d = a.d;
    let mut out = NcSeries::zero(d, order);
    for n in 0..=order {
        let off_n = offset(d, n);
        for k in 0..=n.min(a.order) {
            let m = n - k;
            if m > b.order {
                continue;
            }
            let pm = d.pow(m as u32);
            let (off_k, off_m) = (offset(d, k), offset(d, m));
            for pi in 0..d.pow(k as u32) {
                let ac = &a.coeffs[off_k + pi];
                if ac.is_zero() {
                    continue;
                }
                let base = off_n + pi * pm;
                for si in 0..pm {
                    let bc = &b.coeffs[off_m + si];
                    if bc.is_zero() {
                        continue;
                    }
                    out.coeffs[base + si] += ac.mul_ref(bc);
                }
            }
        }
    }
    out
}

struct Substitution<'a, T> {
    src: &'a NcSeries<T>,
    truncated: &'a [Vec<NcSeries<T>>],
    live: &'a [bool],
    d_out: usize,
}

impl<T: Scalar> Substitution<'_, T> {
    /// Substitutes into `Σ_u a_{v u} z_u` where `v` is the trie node at
    /// `(depth, rank)`, keeping degrees `<= remaining`.
    fn eval(&self, depth: usize, rank: usize, remaining: usize) -> NcSeries<T> {
        let d = self.src.d;
        let node = offset(d, depth) + rank;
        let mut out = NcSeries::constant(self.d_out, remaining, self.src.coeffs[node].clone());
        if remaining == 0 || depth == self.src.order {
            return out;
        }
        for i in 0..d {
            let child_rank = rank * d + i;
            if !self.live[offset(d, depth + 1) + child_rank] {
                continue;
            }
            let inner = self.eval(depth + 1, child_rank, remaining - 1);
            // substituent has no constant term, so inner to degree remaining-1 suffices
            let term = mul_into_order(&self.truncated[remaining][i], &inner, remaining);
            for (o, t) in out.coeffs.iter_mut().zip(term.coeffs) {
                *o += t;
            }
        }
        out
    }
}

impl<T: Scalar> PartialEq for NcSeries<T> {
    /// Equality on all words of degree `<= min(N1, N2)`.
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

impl<T: Scalar> Add for &NcSeries<T> {
    type Output = NcSeries<T>;

    fn add(self, rhs: Self) -> NcSeries<T> {
        self.try_add(rhs).expect("alphabet mismatch")
    }
}

impl<T: Scalar> Sub for &NcSeries<T> {
    type Output = NcSeries<T>;

    fn sub(self, rhs: Self) -> NcSeries<T> {
        self.try_sub(rhs).expect("alphabet mismatch")
    }
}

impl<T: Scalar> Mul for &NcSeries<T> {
    type Output = NcSeries<T>;

    fn mul(self, rhs: Self) -> NcSeries<T> {
        self.try_mul(rhs).expect("alphabet mismatch")
    }
}

impl<T: Scalar> Neg for &NcSeries<T> {
    type Output = NcSeries<T>;

    fn neg(self) -> NcSeries<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Scalar> fmt::Display for NcSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if w.is_empty() {
                write!(f, "{c}")?;
            } else {
                let letters: Vec<String> = w.letters().iter().map(|l| format!("z{l}")).collect();
                write!(f, "({c}) {}", letters.join(" "))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", self.order + 1)
    }
}
