//! Set partitions and their complete lattice.
//!
//! A [`SetPartition`] divides a finite ground set into disjoint nonempty
//! blocks. Partitions of a common ground set are ordered by refinement
//! (`p ≤ q` iff `p` is finer), under which they form a complete but
//! non-distributive lattice: the meet is the common refinement by pairwise
//! block intersections, the join is the transitive closure of "shares a
//! block". Enumeration follows restricted-growth strings, and counting uses
//! the Bell numbers.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors raised by partition operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    /// Two partitions were combined but do not share a ground set.
    #[error("partitions have different ground sets")]
    GroundMismatch,
    /// The blocks passed to a constructor do not form a partition.
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
}

/// A partition of a finite ground set into disjoint nonempty blocks.
///
/// Values are kept in canonical form: the ground set sorted ascending,
/// members sorted within each block, and blocks sorted by their smallest
/// member. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition<E: Ord + Clone> {
    ground: Vec<E>,
    blocks: Vec<Vec<E>>,
}

impl<E: Ord + Clone + fmt::Debug> fmt::Debug for SetPartition<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.blocks.iter()).finish()
    }
}

impl<E: Ord + Clone> SetPartition<E> {
    /// Builds a partition from blocks, canonicalizing their order.
    ///
    /// Fails if the blocks are not disjoint, contain duplicates, or do not
    /// cover the ground set exactly.
    pub fn new(ground: Vec<E>, blocks: Vec<Vec<E>>) -> Result<Self, PartitionError> {
        let mut ground = ground;
        ground.sort();
        if ground.windows(2).any(|w| w[0] == w[1]) {
            return Err(PartitionError::InvalidBlocks(
                "ground set contains duplicates".into(),
            ));
        }
        let mut blocks: Vec<Vec<E>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort();
                b
            })
            .collect();
        blocks.sort();
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(PartitionError::InvalidBlocks("empty block".into()));
        }
        let mut seen: Vec<E> = blocks.iter().flatten().cloned().collect();
        seen.sort();
        if seen != ground {
            return Err(PartitionError::InvalidBlocks(
                "blocks do not partition the ground set".into(),
            ));
        }
        Ok(SetPartition { ground, blocks })
    }

    /// The finest partition: every element in its own block.
    pub fn atoms(ground: Vec<E>) -> Self {
        let mut ground = ground;
        ground.sort();
        ground.dedup();
        let blocks = ground.iter().map(|e| vec![e.clone()]).collect();
        SetPartition { ground, blocks }
    }

    /// The coarsest partition: one block holding everything (no blocks when
    /// the ground set is empty).
    pub fn single(ground: Vec<E>) -> Self {
        let mut ground = ground;
        ground.sort();
        ground.dedup();
        let blocks = if ground.is_empty() {
            Vec::new()
        } else {
            vec![ground.clone()]
        };
        SetPartition { ground, blocks }
    }

    /// The sorted ground set.
    pub fn ground(&self) -> &[E] {
        &self.ground
    }

    /// The blocks in canonical order.
    pub fn blocks(&self) -> &[Vec<E>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index (in canonical block order) of the block containing `e`.
    pub fn block_index_of(&self, e: &E) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(e).is_ok())
    }

    /// Whether `a` and `b` lie in the same block.
    pub fn same_block(&self, a: &E, b: &E) -> bool {
        match (self.block_index_of(a), self.block_index_of(b)) {
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }

    /// Map from each element to the index of its block.
    pub fn block_map(&self) -> BTreeMap<&E, usize> {
        let mut m = BTreeMap::new();
        for (i, b) in self.blocks.iter().enumerate() {
            for e in b {
                m.insert(e, i);
            }
        }
        m
    }

    fn check_ground(&self, other: &Self) -> Result<(), PartitionError> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(PartitionError::GroundMismatch)
        }
    }

    /// Whether `self` is finer than (or equal to) `other`: every block of
    /// `other` is a union of blocks of `self`.
    pub fn is_finer(&self, other: &Self) -> Result<bool, PartitionError> {
        self.check_ground(other)?;
        // Finer iff each of our blocks sits inside a single block of `other`.
        let coarse = other.block_map();
        for b in &self.blocks {
            let target = coarse[&b[0]];
            if b.iter().any(|e| coarse[e] != target) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the two partitions are comparable under refinement.
    pub fn comparable(&self, other: &Self) -> Result<bool, PartitionError> {
        Ok(self.is_finer(other)? || other.is_finer(self)?)
    }

    /// Greatest lower bound: the common refinement whose blocks are the
    /// nonempty pairwise intersections of a block of `self` with a block of
    /// `other`.
    pub fn meet(&self, other: &Self) -> Result<Self, PartitionError> {
        self.check_ground(other)?;
        let mine = self.block_map();
        let theirs = other.block_map();
        let mut cells: BTreeMap<(usize, usize), Vec<E>> = BTreeMap::new();
        for e in &self.ground {
            cells
                .entry((mine[e], theirs[e]))
                .or_default()
                .push(e.clone());
        }
        let mut blocks: Vec<Vec<E>> = cells.into_values().collect();
        blocks.sort();
        Ok(SetPartition {
            ground: self.ground.clone(),
            blocks,
        })
    }

    /// Least upper bound: the finest partition coarser than both, i.e. the
    /// connected components of the relation "shares a block in either".
    pub fn join(&self, other: &Self) -> Result<Self, PartitionError> {
        self.check_ground(other)?;
        let n = self.ground.len();
        let mut uf = UnionFind::new(n);
        let index: BTreeMap<&E, usize> = self
            .ground
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            for pair in b.windows(2) {
                uf.union(index[&pair[0]], index[&pair[1]]);
            }
        }
        let mut groups: BTreeMap<usize, Vec<E>> = BTreeMap::new();
        for (i, e) in self.ground.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(e.clone());
        }
        let mut blocks: Vec<Vec<E>> = groups.into_values().collect();
        blocks.sort();
        Ok(SetPartition {
            ground: self.ground.clone(),
            blocks,
        })
    }

    /// Restriction to a subset of the ground set: blocks are intersected
    /// with `keep` and empty intersections dropped.
    pub fn restrict(&self, keep: &[E]) -> Self {
        let mut keep = keep.to_vec();
        keep.sort();
        keep.dedup();
        let blocks: Vec<Vec<E>> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .filter(|e| keep.binary_search(e).is_ok())
                    .cloned()
                    .collect::<Vec<E>>()
            })
            .filter(|b: &Vec<E>| !b.is_empty())
            .collect();
        let mut blocks = blocks;
        blocks.sort();
        SetPartition {
            ground: keep,
            blocks,
        }
    }

    /// Rebuilds a partition of the same shape over new element values.
    ///
    /// `f` must be injective on the ground set.
    pub fn map_elements<F2: Ord + Clone>(
        &self,
        mut f: impl FnMut(&E) -> F2,
    ) -> SetPartition<F2> {
        let ground: Vec<F2> = self.ground.iter().map(&mut f).collect();
        let blocks: Vec<Vec<F2>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(&mut f).collect())
            .collect();
        SetPartition::new(ground, blocks).expect("mapping a valid partition stays valid")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Streams every partition of `ground` exactly once, in restricted-growth
/// lexicographic order. The count equals `bell(ground.len())`.
pub fn all_partitions<E: Ord + Clone>(ground: &[E]) -> Partitions<E> {
    let mut sorted = ground.to_vec();
    sorted.sort();
    sorted.dedup();
    Partitions {
        ground: sorted,
        rgs: None,
        done: false,
    }
}

/// Iterator over all partitions of a ground set. See [`all_partitions`].
pub struct Partitions<E: Ord + Clone> {
    ground: Vec<E>,
    rgs: Option<Vec<usize>>,
    done: bool,
}

impl<E: Ord + Clone> Partitions<E> {
    fn emit(&self, rgs: &[usize]) -> SetPartition<E> {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks: Vec<Vec<E>> = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(self.ground[i].clone());
        }
        // Restricted-growth labels index blocks by first appearance, which is
        // already the canonical block order.
        SetPartition {
            ground: self.ground.clone(),
            blocks,
        }
    }
}

impl<E: Ord + Clone> Iterator for Partitions<E> {
    type Item = SetPartition<E>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let n = self.ground.len();
        match &mut self.rgs {
            None => {
                let rgs = vec![0; n];
                let out = self.emit(&rgs);
                if n <= 1 {
                    self.done = true;
                } else {
                    self.rgs = Some(rgs);
                }
                Some(out)
            }
            Some(rgs) => {
                // Successor in restricted-growth order: find the rightmost
                // position that can be incremented (a[i] ≤ max(a[..i])),
                // increment it, zero the tail.
                let mut i = n;
                loop {
                    if i == 1 {
                        self.done = true;
                        return None;
                    }
                    i -= 1;
                    let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
                    if rgs[i] <= prefix_max {
                        rgs[i] += 1;
                        for v in rgs[i + 1..].iter_mut() {
                            *v = 0;
                        }
                        break;
                    }
                }
                let rgs = rgs.clone();
                Some(self.emit(&rgs))
            }
        }
    }
}

/// The Bell number B_d via the recursion B_{d+1} = Σ_k (d choose k) B_k.
pub fn bell(d: usize) -> BigUint {
    let mut known: Vec<BigUint> = vec![BigUint::one()];
    for m in 0..d {
        // B_{m+1} = Σ_{k=0..m} C(m,k) B_k
        let mut next = BigUint::zero();
        let mut binom = BigUint::one();
        for (k, b) in known.iter().enumerate().take(m + 1) {
            next += &binom * b;
            // C(m, k+1) = C(m,k) * (m-k) / (k+1)
            binom = binom * BigUint::from(m - k) / BigUint::from(k + 1);
        }
        known.push(next);
    }
    known[d].clone()
}

/// Dobiński cross-check: the least integer greater than the sum of the first
/// `2d` terms of e⁻¹ Σ_k k^d / k!. Agrees with [`bell`] for d ≤ 20.
///
/// The factor e⁻¹ is bracketed by consecutive partial sums of its
/// alternating series; the bracket is tight enough (60 terms) that both ends
/// share a floor, which pins down the answer exactly.
pub fn bell_dobinski(d: usize) -> BigUint {
    let mut sum = BigRational::zero();
    let mut factorial = BigRational::one();
    for k in 0..2 * d {
        if k > 0 {
            factorial *= BigRational::from_integer(k.into());
        }
        let kd = BigRational::from_integer(BigUint::from(k).pow(d as u32).into());
        sum += kd / factorial.clone();
    }
    let mut term = BigRational::one();
    let mut curr = BigRational::one();
    let mut prev = BigRational::one();
    for j in 1..=60u32 {
        term = -term / BigRational::from_integer(j.into());
        prev = curr.clone();
        curr += term.clone();
    }
    let (lo_e, hi_e) = if curr < prev { (curr, prev) } else { (prev, curr) };
    let lower = sum.clone() * lo_e;
    let upper = sum * hi_e;
    assert_eq!(
        lower.floor(),
        upper.floor(),
        "e-bracket too loose to determine the Dobinski bound"
    );
    let candidate = lower.floor().to_integer() + num_bigint::BigInt::one();
    candidate
        .to_biguint()
        .expect("Dobinski bound is nonnegative")
}

/// Number of coloured graphs on `v` labelled vertices:
/// B_v · B_{v(v−1)/2 + 1}.
pub fn model_count(v: usize) -> BigUint {
    bell(v) * bell(v * (v - 1) / 2 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[u32]]) -> SetPartition<u32> {
        let ground: Vec<u32> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
        SetPartition::new(ground, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn finer_examples() {
        assert!(p(&[&[1], &[2], &[3]]).is_finer(&p(&[&[1, 2], &[3]])).unwrap());
        assert!(!p(&[&[1, 2], &[3]]).is_finer(&p(&[&[1], &[2, 3]])).unwrap());
        let same = p(&[&[1, 2, 3]]);
        assert!(same.is_finer(&same).unwrap());
    }

    #[test]
    fn ground_mismatch_is_an_error() {
        let a = p(&[&[1, 2]]);
        let b = p(&[&[1, 3]]);
        assert_eq!(a.is_finer(&b), Err(PartitionError::GroundMismatch));
        assert!(a.meet(&b).is_err());
        assert!(a.join(&b).is_err());
    }

    #[test]
    fn meet_examples() {
        assert_eq!(
            p(&[&[1, 2], &[3]]).meet(&p(&[&[1], &[2, 3]])).unwrap(),
            p(&[&[1], &[2], &[3]])
        );
        assert_eq!(
            p(&[&[1, 2, 3, 4]]).meet(&p(&[&[1, 2], &[3, 4]])).unwrap(),
            p(&[&[1, 2], &[3, 4]])
        );
        // Brute-force check below confirms this is the lattice inf on [4].
        assert_eq!(
            p(&[&[1, 3], &[2, 4]]).meet(&p(&[&[1, 2], &[3, 4]])).unwrap(),
            p(&[&[1], &[2], &[3], &[4]])
        );
    }

    #[test]
    fn join_examples() {
        assert_eq!(
            p(&[&[1, 2], &[3]]).join(&p(&[&[1], &[2, 3]])).unwrap(),
            p(&[&[1, 2, 3]])
        );
        let q = p(&[&[1, 3], &[2, 4]]);
        assert_eq!(p(&[&[1], &[2], &[3], &[4]]).join(&q).unwrap(), q);
        assert_eq!(
            p(&[&[1, 3], &[2], &[4]]).join(&p(&[&[1], &[3], &[2, 4]])).unwrap(),
            p(&[&[1, 3], &[2, 4]])
        );
    }

    #[test]
    fn enumeration_counts_match_bell() {
        assert_eq!(all_partitions::<u32>(&[]).count(), 1);
        assert_eq!(all_partitions(&[1, 2, 3]).count(), 5);
        let ground: Vec<u32> = (1..=7).collect();
        assert_eq!(all_partitions(&ground).count(), 877);
        for n in 0..=8u32 {
            let ground: Vec<u32> = (1..=n).collect();
            assert_eq!(
                BigUint::from(all_partitions(&ground).count()),
                bell(n as usize),
                "count mismatch at n={n}"
            );
        }
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let ground: Vec<u32> = (1..=5).collect();
        let mut seen = std::collections::HashSet::new();
        for part in all_partitions(&ground) {
            assert!(seen.insert(part.blocks().to_vec()));
        }
        assert_eq!(seen.len(), 52);
    }

    #[test]
    fn bell_values() {
        assert_eq!(bell(0), BigUint::from(1u32));
        assert_eq!(bell(4), BigUint::from(15u32));
        assert_eq!(bell(11), BigUint::from(678570u32));
    }

    #[test]
    fn bell_agrees_with_dobinski_bound() {
        for d in 0..=20 {
            assert_eq!(bell(d), bell_dobinski(d), "mismatch at d={d}");
        }
    }

    #[test]
    fn model_count_values() {
        assert_eq!(model_count(1), BigUint::from(1u32));
        assert_eq!(model_count(4), BigUint::from(13155u32));
        assert_eq!(model_count(5), BigUint::from(35285640u64));
    }

    #[test]
    fn meet_join_match_brute_force_on_ground_4() {
        let ground: Vec<u32> = (1..=4).collect();
        let all: Vec<SetPartition<u32>> = all_partitions(&ground).collect();
        for a in &all {
            for b in &all {
                let meet = a.meet(b).unwrap();
                let join = a.join(b).unwrap();
                // Lattice bound properties.
                assert!(meet.is_finer(a).unwrap() && meet.is_finer(b).unwrap());
                assert!(a.is_finer(&join).unwrap() && b.is_finer(&join).unwrap());
                // Extremality against the enumerated lattice.
                for c in &all {
                    if c.is_finer(a).unwrap() && c.is_finer(b).unwrap() {
                        assert!(c.is_finer(&meet).unwrap());
                    }
                    if a.is_finer(c).unwrap() && b.is_finer(c).unwrap() {
                        assert!(join.is_finer(c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn lattice_laws_on_ground_4() {
        let ground: Vec<u32> = (1..=4).collect();
        let all: Vec<SetPartition<u32>> = all_partitions(&ground).collect();
        for a in &all {
            assert_eq!(a.meet(a).unwrap(), *a);
            assert_eq!(a.join(a).unwrap(), *a);
            for b in &all {
                assert_eq!(a.meet(b).unwrap(), b.meet(a).unwrap());
                assert_eq!(a.join(b).unwrap(), b.join(a).unwrap());
                // Absorption.
                assert_eq!(a.meet(&a.join(b).unwrap()).unwrap(), *a);
                assert_eq!(a.join(&a.meet(b).unwrap()).unwrap(), *a);
            }
        }
        // Associativity on a sample of triples (full cube is 15³).
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let c = &all[(i * 7 + j * 3) % all.len()];
                assert_eq!(
                    a.meet(&b.meet(c).unwrap()).unwrap(),
                    a.meet(b).unwrap().meet(c).unwrap()
                );
                assert_eq!(
                    a.join(&b.join(c).unwrap()).unwrap(),
                    a.join(b).unwrap().join(c).unwrap()
                );
            }
        }
    }

    #[test]
    fn non_distributive_witness_on_ground_3() {
        let ground: Vec<u32> = (1..=3).collect();
        let all: Vec<SetPartition<u32>> = all_partitions(&ground).collect();
        let mut found = false;
        'outer: for a in &all {
            for b in &all {
                for c in &all {
                    let lhs = a.join(&b.meet(c).unwrap()).unwrap();
                    let rhs = a.join(b).unwrap().meet(&a.join(c).unwrap()).unwrap();
                    if lhs != rhs {
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(found, "partition lattice on [3] should not be distributive");
    }

    #[test]
    fn restrict_keeps_shape() {
        let part = p(&[&[1, 2], &[3, 4], &[5]]);
        let r = part.restrict(&[2, 3, 4]);
        assert_eq!(r, p(&[&[2], &[3, 4]]));
    }
}
