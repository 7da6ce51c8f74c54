//! Partition-sum definitions of the cumulant families.
//!
//! These enumerate interval and non-crossing partitions directly and are
//! exponential in the degree; they exist to cross-check the
//! generating-function code in the parent module.

use crate::error::{Error, Result};
use crate::partitions::{enumerate_interval, enumerate_nc, SetPartition};
use crate::scalar::Scalar;
use crate::series::{NcSeries, Word};

use super::{CumulantKind, CumulantSeries, Functional};

/// Blocks as 0-based positions, with outer/inner flags.
struct Shape {
    blocks: Vec<Vec<usize>>,
    outer: Vec<bool>,
    full: bool,
}

fn shapes(parts: Vec<SetPartition>) -> Vec<Shape> {
    parts
        .into_iter()
        .map(|p| {
            let outer = p.outer_flags().expect("non-crossing input");
            let blocks: Vec<Vec<usize>> = p.blocks().iter().map(|b| b.iter().map(|&i| i - 1).collect()).collect();
            Shape { full: blocks.len() == 1, blocks, outer }
        })
        .collect()
}

fn interval_shapes(n: usize) -> Vec<Shape> {
    shapes(enumerate_interval(n))
}

fn nc_shapes(n: usize) -> Result<Vec<Shape>> {
    Ok(shapes(enumerate_nc(n)?))
}

/// `sum_pi prod_{B outer} outer[u|B] prod_{B inner} inner[u|B]`, optionally
/// skipping the one-block partition.
fn partition_sum<T: Scalar>(
    shapes: &[Shape],
    letters: &[usize],
    outer: &NcSeries<T>,
    inner: &NcSeries<T>,
    skip_full: bool,
) -> T {
    let mut total = T::zero();
    let mut sub = Vec::with_capacity(letters.len());
    for s in shapes {
        if skip_full && s.full {
            continue;
        }
        let mut prod = T::one();
        for (block, &is_outer) in s.blocks.iter().zip(&s.outer) {
            sub.clear();
            sub.extend(block.iter().map(|&i| letters[i]));
            let c = if is_outer { outer.at(&sub) } else { inner.at(&sub) };
            if c.is_zero() {
                prod = T::zero();
                break;
            }
            prod = prod.mul_ref(c);
        }
        total += prod;
    }
    total
}

fn build<T: Scalar>(
    d: usize,
    order: usize,
    shapes_of: impl Fn(usize) -> Result<Vec<Shape>>,
    mut coeff: impl FnMut(&[Shape], &Word, &NcSeries<T>) -> T,
    constant: T,
) -> Result<NcSeries<T>> {
    let mut out = NcSeries::constant(d, order, constant);
    for n in 1..=order {
        let sh = shapes_of(n)?;
        for w in Word::of_degree(d, n) {
            let c = coeff(&sh, &w, &out);
            out.set(&w, c)?;
        }
    }
    Ok(out)
}

/// Moments as a sum over interval partitions of Boolean cumulants.
pub fn moments_from_boolean<T: Scalar>(eta: &CumulantSeries<T>) -> Result<Functional<T>> {
    let s = eta.series();
    let m = build(s.d(), s.order(), |n| Ok(interval_shapes(n)), |sh, w, _| partition_sum(sh, w.letters(), s, s, false), T::one())?;
    Functional::new(m)
}

/// Boolean cumulants by Möbius recursion over interval partitions.
pub fn boolean_from_moments<T: Scalar>(f: &Functional<T>) -> Result<CumulantSeries<T>> {
    let m = f.moments();
    let eta = build(
        m.d(),
        m.order(),
        |n| Ok(interval_shapes(n)),
        |sh, w, acc| m.coeff(w) - partition_sum(sh, w.letters(), acc, acc, true),
        T::zero(),
    )?;
    CumulantSeries::new(CumulantKind::Boolean, eta)
}

/// Moments as a sum over non-crossing partitions of free cumulants.
pub fn moments_from_free<T: Scalar>(r: &CumulantSeries<T>) -> Result<Functional<T>> {
    let s = r.series();
    let m = build(s.d(), s.order(), nc_shapes, |sh, w, _| partition_sum(sh, w.letters(), s, s, false), T::one())?;
    Functional::new(m)
}

/// Free cumulants by Möbius recursion over non-crossing partitions.
pub fn free_from_moments<T: Scalar>(f: &Functional<T>) -> Result<CumulantSeries<T>> {
    let m = f.moments();
    let r = build(
        m.d(),
        m.order(),
        nc_shapes,
        |sh, w, acc| m.coeff(w) - partition_sum(sh, w.letters(), acc, acc, true),
        T::zero(),
    )?;
    CumulantSeries::new(CumulantKind::Free, r)
}

/// `phi[x_u] = sum_{pi in NC} prod_{outer} R^{phi,psi}[u|B] prod_{inner} R^psi[u|B]`.
pub fn pair_moments<T: Scalar>(r_pair: &CumulantSeries<T>, r_psi: &CumulantSeries<T>) -> Result<Functional<T>> {
    let (outer, inner) = (r_pair.series(), r_psi.series());
    if outer.d() != inner.d() {
        return Err(Error::AlphabetMismatch { left: outer.d(), right: inner.d() });
    }
    let order = outer.order().min(inner.order());
    let m = build(outer.d(), order, nc_shapes, |sh, w, _| partition_sum(sh, w.letters(), outer, inner, false), T::one())?;
    Functional::new(m)
}

/// Two-state cumulants by recursion over non-crossing partitions, with the
/// free cumulants of `psi` on inner blocks.
pub fn two_state_from_pair<T: Scalar>(phi: &Functional<T>, psi: &Functional<T>) -> Result<CumulantSeries<T>> {
    if phi.d() != psi.d() {
        return Err(Error::AlphabetMismatch { left: phi.d(), right: psi.d() });
    }
    let order = phi.order().min(psi.order());
    let r_psi = free_from_moments(&psi.truncate(order))?;
    let inner = r_psi.series();
    let m = phi.moments();
    let r = build(
        phi.d(),
        order,
        nc_shapes,
        |sh, w, acc| m.coeff(w) - partition_sum(sh, w.letters(), acc, inner, true),
        T::zero(),
    )?;
    CumulantSeries::new(CumulantKind::TwoState, r)
}
