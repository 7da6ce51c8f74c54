//! Set partitions of `{1..n}`: non-crossing, interval and `NC'` families,
//! inner/outer block classification and the `<<` relation.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default largest `n` for which [`enumerate_nc`] will run.
pub const DEFAULT_MAX_N: usize = 14;

/// A partition of `{1..n}` into nonempty blocks.
///
/// Blocks are sorted internally and ordered by their minima.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates and canonicalizes a list of 1-based blocks.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i == 0 || i > n {
                    return Err(Error::InvalidPartition(format!("element {i} outside 1..={n}")));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("element {i} repeated")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = (1..=n).find(|&i| !seen[i]) {
            return Err(Error::InvalidPartition(format!("element {i} missing")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    fn from_canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { n, blocks }
    }

    /// The one-block partition `1_n`.
    pub fn full(n: usize) -> Self {
        let blocks = if n == 0 { vec![] } else { vec![(1..=n).collect()] };
        Self { n, blocks }
    }

    /// The all-singletons partition `0_n`.
    pub fn singletons(n: usize) -> Self {
        Self { n, blocks: (1..=n).map(|i| vec![i]).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block label of each element (`labels[i-1]` for element `i`).
    fn labels(&self) -> Vec<usize> {
        let mut lab = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                lab[i - 1] = k;
            }
        }
        lab
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        let lab = self.labels();
        lab[i - 1] == lab[j - 1]
    }

    pub fn is_noncrossing(&self) -> bool {
        // a < b < c < e with a ~ c, b ~ e in different blocks
        self.blocks.iter().enumerate().all(|(k, b)| {
            self.blocks.iter().enumerate().all(|(l, c)| {
                k == l
                    || !b.windows(2).any(|pair| {
                        let inside = c.iter().any(|&x| pair[0] < x && x < pair[1]);
                        let outside = c.iter().any(|&x| x < pair[0] || x > pair[1]);
                        inside && outside
                    })
            })
        })
    }

    /// Every block is a run of consecutive integers.
    pub fn is_interval(&self) -> bool {
        self.blocks.iter().all(|b| b.windows(2).all(|p| p[1] == p[0] + 1))
    }

    /// Non-crossing with `1` and `n` in one block.
    pub fn is_nc_prime(&self) -> bool {
        self.n >= 1 && self.is_noncrossing() && self.blocks[0].last() == Some(&self.n)
    }

    /// Singleton blocks, `Sing(pi)`.
    pub fn singleton_blocks(&self) -> Vec<usize> {
        self.blocks.iter().filter(|b| b.len() == 1).map(|b| b[0]).collect()
    }

    /// Splits the blocks of a non-crossing partition into (outer, inner).
    ///
    /// A block is inner when it sits strictly between two elements of some
    /// other block.
    pub fn classify_blocks(&self) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
        if !self.is_noncrossing() {
            return Err(Error::Crossing);
        }
        let (mut outer, mut inner) = (Vec::new(), Vec::new());
        for b in &self.blocks {
            if self.nested(b) {
                inner.push(b.clone());
            } else {
                outer.push(b.clone());
            }
        }
        Ok((outer, inner))
    }

    /// Outer flag per block, in block order.
    pub fn outer_flags(&self) -> Result<Vec<bool>> {
        if !self.is_noncrossing() {
            return Err(Error::Crossing);
        }
        Ok(self.blocks.iter().map(|b| !self.nested(b)).collect())
    }

    fn nested(&self, b: &[usize]) -> bool {
        let (lo, hi) = (b[0], b[b.len() - 1]);
        self.blocks.iter().any(|c| c[0] < lo && c[c.len() - 1] > hi)
    }

    /// `self <= other` in refinement order.
    pub fn refines(&self, other: &SetPartition) -> bool {
        let lab = other.labels();
        self.n == other.n && self.blocks.iter().all(|b| b.iter().all(|&i| lab[i - 1] == lab[b[0] - 1]))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let items: Vec<String> = b.iter().map(|i| i.to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        write!(f, "}}")
    }
}

/// `p << s`: `p` refines `s` and every block of `s` has its minimum and
/// maximum in one block of `p`.
pub fn is_ll(p: &SetPartition, s: &SetPartition) -> Result<bool> {
    if p.n != s.n {
        return Err(Error::GroundSetMismatch { left: p.n, right: s.n });
    }
    if !p.is_noncrossing() || !s.is_noncrossing() {
        return Err(Error::Crossing);
    }
    let lab = p.labels();
    Ok(p.refines(s) && s.blocks.iter().all(|b| lab[b[0] - 1] == lab[b[b.len() - 1] - 1]))
}

/// All non-crossing partitions of `{1..n}`, capped at [`DEFAULT_MAX_N`].
pub fn enumerate_nc(n: usize) -> Result<Vec<SetPartition>> {
    enumerate_nc_with_cap(n, DEFAULT_MAX_N)
}

/// All non-crossing partitions of `{1..n}` with an explicit size cap.
///
/// Built by placing the block of `1` and recursing into the gaps it leaves.
/// Output is sorted, hence deterministic.
pub fn enumerate_nc_with_cap(n: usize, cap: usize) -> Result<Vec<SetPartition>> {
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    let mut memo = HashMap::new();
    let raw = nc_shapes(n, &mut memo);
    let mut out: Vec<SetPartition> = raw
        .iter()
        .map(|blocks| {
            let blocks = blocks.iter().map(|b| b.iter().map(|&i| i + 1).collect()).collect();
            SetPartition::from_canonical(n, blocks)
        })
        .collect();
    out.sort();
    Ok(out)
}

type Shape = Vec<Vec<usize>>;

/// Non-crossing partitions of `{0..m-1}` (0-based).
fn nc_shapes(m: usize, memo: &mut HashMap<usize, Vec<Shape>>) -> Vec<Shape> {
    if let Some(v) = memo.get(&m) {
        return v.clone();
    }
    let out = if m == 0 {
        vec![vec![]]
    } else {
        let mut out = Vec::new();
        extend_first_block(m, vec![0], vec![], &mut out, memo);
        out
    };
    memo.insert(m, out.clone());
    out
}

/// Grows the block containing 0; `fixed` holds blocks already placed in
/// earlier gaps.
fn extend_first_block(
    m: usize,
    block: Vec<usize>,
    fixed: Vec<Vec<Shape>>,
    out: &mut Vec<Shape>,
    memo: &mut HashMap<usize, Vec<Shape>>,
) {
    let last = *block.last().unwrap();
    // close the block: the tail after `last` is free
    let tail = shifted(nc_shapes(m - 1 - last, memo), last + 1);
    let mut options = fixed.clone();
    options.push(tail);
    for combo in product(&options) {
        let mut blocks = vec![block.clone()];
        blocks.extend(combo);
        out.push(blocks);
    }
    // or add the next element j, freezing the gap (last, j)
    for j in last + 1..m {
        let gap = shifted(nc_shapes(j - last - 1, memo), last + 1);
        let mut next_fixed = fixed.clone();
        next_fixed.push(gap);
        let mut next_block = block.clone();
        next_block.push(j);
        extend_first_block(m, next_block, next_fixed, out, memo);
    }
}

fn shifted(shapes: Vec<Shape>, by: usize) -> Vec<Shape> {
    shapes
        .into_iter()
        .map(|s| s.into_iter().map(|b| b.into_iter().map(|i| i + by).collect()).collect())
        .collect()
}

/// Cartesian product of alternative block lists, concatenated.
fn product(options: &[Vec<Shape>]) -> Vec<Shape> {
    options.iter().fold(vec![vec![]], |acc, opts| {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for a in &acc {
            for o in opts {
                let mut blocks = a.clone();
                blocks.extend(o.iter().cloned());
                next.push(blocks);
            }
        }
        next
    })
}

/// All interval partitions of `{1..n}` (`2^(n-1)` of them for `n >= 1`).
pub fn enumerate_interval(n: usize) -> Vec<SetPartition> {
    if n == 0 {
        return vec![SetPartition::full(0)];
    }
    let mut out: Vec<SetPartition> = (0u64..1 << (n - 1))
        .map(|cuts| {
            let mut blocks = vec![vec![1]];
            for i in 2..=n {
                if cuts >> (i - 2) & 1 == 1 {
                    blocks.push(vec![i]);
                } else {
                    blocks.last_mut().unwrap().push(i);
                }
            }
            SetPartition::from_canonical(n, blocks)
        })
        .collect();
    out.sort();
    out
}

/// `NC'(n)`: non-crossing partitions joining `1` and `n`.
pub fn enumerate_nc_prime(n: usize) -> Result<Vec<SetPartition>> {
    Ok(enumerate_nc(n)?.into_iter().filter(|p| n == 0 || p.is_nc_prime()).collect())
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn nc_prime_has_one_outer_block_with_both_ends(n in 1usize..=9) {
            for p in enumerate_nc_prime(n).unwrap() {
                let (outer, _) = p.classify_blocks().unwrap();
                prop_assert_eq!(outer.len(), 1);
                prop_assert!(outer[0].contains(&1) && outer[0].contains(&n));
            }
        }

        #[test]
        fn interval_partitions_are_noncrossing(n in 1usize..=9) {
            let nc: std::collections::HashSet<_> = enumerate_nc(n).unwrap().into_iter().map(|p| p.blocks().to_vec()).collect();
            for p in enumerate_interval(n) {
                prop_assert!(nc.contains(p.blocks()));
            }
        }
    }
}
