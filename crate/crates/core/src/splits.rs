//! Splits of the label set `{0..n}`, their canonical order, compatibility,
//! and the split-vector encoding of trees.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use crate::bits::LabelBits;
use crate::error::{Error, Result};
use crate::tree::Tree;

/// Largest `n` for which split indices fit in `u128`.
pub const MAX_RANKED_N: usize = 126;

/// Largest `n` for which [`canonical_order`] materializes the full order.
pub const MAX_ENUMERATED_N: usize = 20;

/// A two-block partition of `{0..n}`, stored by its canonical block.
///
/// The canonical block is the smaller one; when both have `(n+1)/2` labels
/// it is the one holding `0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Split {
    n: usize,
    side: LabelBits,
    clade: LabelBits,
    len: usize,
}

impl Split {
    /// Builds a split from either of its blocks.
    pub fn new(n: usize, block: &LabelBits) -> Result<Split> {
        let full = LabelBits::full(n);
        if !block.is_subset(&full) {
            return Err(Error::Domain(format!("{block} (labels beyond {n})")));
        }
        let k = block.len();
        if k < 2 || n + 1 - k < 2 {
            return Err(Error::Domain(format!("{block}")));
        }
        let other = block.complement_in(&full);
        let side = match k.cmp(&(n + 1 - k)) {
            Ordering::Less => block.clone(),
            Ordering::Greater => other,
            Ordering::Equal if block.contains(0) => block.clone(),
            Ordering::Equal => other,
        };
        let clade = if side.contains(0) {
            side.complement_in(&full)
        } else {
            side.clone()
        };
        let len = side.len();
        Ok(Split { n, side, clade, len })
    }

    pub fn from_labels<I: IntoIterator<Item = usize>>(n: usize, labels: I) -> Result<Split> {
        let labels: Vec<usize> = labels.into_iter().collect();
        if let Some(&bad) = labels.iter().find(|&&l| l > n) {
            return Err(Error::Domain(format!("label {bad} outside 0..={n}")));
        }
        Split::new(n, &LabelBits::from_labels(n, labels))
    }

    /// The split induced by an edge whose lower side holds `clade` (no root).
    pub fn from_clade(n: usize, clade: &LabelBits) -> Result<Split> {
        Split::new(n, clade)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical block.
    pub fn side(&self) -> &LabelBits {
        &self.side
    }

    /// The block that does not contain the root label 0.
    pub fn clade(&self) -> &LabelBits {
        &self.clade
    }

    pub fn side_len(&self) -> usize {
        self.len
    }

    /// `ab|cd`-style test on clades: nested or disjoint.
    #[inline]
    pub(crate) fn compatible_with(&self, other: &Split) -> bool {
        self.clade.is_disjoint(&other.clade)
            || self.clade.is_subset(&other.clade)
            || other.clade.is_subset(&self.clade)
    }
}

impl Ord for Split {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then(self.len.cmp(&other.len)).then_with(|| {
            match self.side.first_difference(&other.side) {
                None => Ordering::Equal,
                Some(d) if self.side.contains(d) => Ordering::Less,
                Some(_) => Ordering::Greater,
            }
        })
    }
}

impl PartialOrd for Split {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.side, f)
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|n={}", self.side, self.n)
    }
}

/// Symmetric compatibility predicate on two splits of the same label set.
pub fn compatible(a: &Split, b: &Split) -> Result<bool> {
    if a.n != b.n {
        return Err(Error::SizeMismatch(a.n, b.n));
    }
    Ok(a.compatible_with(b))
}

/// True iff every pair in `ss` is compatible.
pub fn is_compatible_set(ss: &[Split]) -> bool {
    first_incompatible_pair(ss).is_none()
}

fn first_incompatible_pair(ss: &[Split]) -> Option<(usize, usize)> {
    for i in 0..ss.len() {
        for j in i + 1..ss.len() {
            if ss[i].n != ss[j].n || !ss[i].compatible_with(&ss[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// One split per internal edge of `t`.
pub fn splits_of(t: &Tree) -> BTreeSet<Split> {
    weighted_splits(t).into_iter().map(|(s, _)| s).collect()
}

/// Internal-edge splits with their weights, in canonical order.
pub fn weighted_splits(t: &Tree) -> Vec<(Split, f64)> {
    let mut out: Vec<(Split, f64)> = t
        .internal_edges()
        .map(|e| {
            let s = Split::from_clade(t.n(), t.clade(e)).expect("internal edge clade is a valid split");
            (s, t.weight(e))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

// ---------------------------------------------------------------------------
// Ranking

fn pascal() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let size = MAX_RANKED_N + 2;
        let mut t = vec![vec![0u128; size]; size];
        for n in 0..size {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        0
    } else {
        pascal()[n][k]
    }
}

fn check_ranked(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Size(format!("no internal splits exist for n={n}")));
    }
    if n > MAX_RANKED_N {
        return Err(Error::Overflow(format!("split indices for n={n} exceed u128")));
    }
    Ok(())
}

/// `|σ(S)| = 2^n - n - 2` for `S = {0..n}`.
pub fn split_count(n: usize) -> Result<u128> {
    check_ranked(n)?;
    Ok((1u128 << n) - n as u128 - 2)
}

/// Number of canonical splits whose side is shorter than `len`.
fn block_offset(n: usize, len: usize) -> u128 {
    (2..len).map(|j| binom(n + 1, j)).sum()
}

/// 0-based lexicographic rank of an ascending `k`-subset of `0..universe`.
fn lex_rank(elems: &[usize], universe: usize) -> u128 {
    let k = elems.len();
    let mut rank = 0u128;
    let mut prev: Option<usize> = None;
    for (i, &c) in elems.iter().enumerate() {
        let start = prev.map_or(0, |p| p + 1);
        for v in start..c {
            rank += binom(universe - 1 - v, k - 1 - i);
        }
        prev = Some(c);
    }
    rank
}

fn lex_unrank(mut rank: u128, k: usize, universe: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut v = 0usize;
    for i in 0..k {
        loop {
            let below = binom(universe - 1 - v, k - 1 - i);
            if rank < below {
                break;
            }
            rank -= below;
            v += 1;
        }
        out.push(v);
        v += 1;
    }
    out
}

/// 1-based position of `s` in the canonical order of `σ(S)`.
pub fn split_index(s: &Split) -> Result<u128> {
    let n = s.n;
    check_ranked(n)?;
    let k = s.len;
    let half_tie = n % 2 == 1 && k == n.div_ceil(2);
    let rank = if half_tie {
        // Tied halves: rank the side without 0 among subsets of {1..n}.
        let rest: Vec<usize> = s.side.iter().filter(|&l| l != 0).map(|l| l - 1).collect();
        block_offset(n, k) + lex_rank(&rest, n)
    } else {
        block_offset(n, k) + lex_rank(&s.side.to_vec(), n + 1)
    };
    Ok(rank + 1)
}

/// Inverse of [`split_index`].
pub fn split_at(n: usize, index: u128) -> Result<Split> {
    let total = split_count(n)?;
    if index == 0 || index > total {
        return Err(Error::Domain(format!("index {index} outside 1..={total} for n={n}")));
    }
    let mut rank = index - 1;
    for k in 2..=n / 2 {
        let block = binom(n + 1, k);
        if rank < block {
            return Split::from_labels(n, lex_unrank(rank, k, n + 1));
        }
        rank -= block;
    }
    let k = n.div_ceil(2);
    let rest = lex_unrank(rank, k - 1, n);
    Split::from_labels(n, std::iter::once(0).chain(rest.into_iter().map(|l| l + 1)))
}

/// The full canonical order `σ(S)` for small `n`.
#[derive(Clone, Debug)]
pub struct SplitOrder {
    n: usize,
    splits: Vec<Split>,
}

impl SplitOrder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    /// 1-based position by binary search.
    pub fn position(&self, s: &Split) -> Result<usize> {
        if s.n != self.n {
            return Err(Error::SizeMismatch(s.n, self.n));
        }
        self.splits
            .binary_search(s)
            .map(|i| i + 1)
            .map_err(|_| Error::Domain(s.to_string()))
    }

    pub fn get(&self, index: usize) -> Option<&Split> {
        index.checked_sub(1).and_then(|i| self.splits.get(i))
    }
}

/// Enumerates `σ(S)` in canonical order by walking subsets of `{0..n}` by size.
pub fn canonical_order(n: usize) -> Result<SplitOrder> {
    if n < 3 {
        return Err(Error::Size(format!("no internal splits exist for n={n}")));
    }
    if n > MAX_ENUMERATED_N {
        return Err(Error::Size(format!(
            "refusing to materialize 2^{n} splits; use split_index/split_at"
        )));
    }
    let mut splits = Vec::new();
    let mut push_subsets = |k: usize, universe: &[usize], fixed: Option<usize>| {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let labels = fixed.into_iter().chain(idx.iter().map(|&i| universe[i]));
            splits.push(Split::from_labels(n, labels).expect("canonical subset"));
            let mut i = k;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if idx[i] != i + universe.len() - k {
                    break;
                }
                if i == 0 {
                    return;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    };
    let all: Vec<usize> = (0..=n).collect();
    for k in 2..=n / 2 {
        push_subsets(k, &all, None);
    }
    if n % 2 == 1 {
        push_subsets(n.div_ceil(2) - 1, &all[1..], Some(0));
    }
    Ok(SplitOrder { n, splits })
}

/// 0/1 indicator of an arbitrary split set over the canonical order.
///
/// No compatibility is required; this is the plain set encoding.
pub fn binary_of_set(n: usize, set: &[Split]) -> Result<Vec<u8>> {
    let order = canonical_order(n)?;
    let mut bits = vec![0u8; order.len()];
    for s in set {
        bits[order.position(s)? - 1] = 1;
    }
    Ok(bits)
}

/// Inverse of [`binary_of_set`].
pub fn set_of_binary(n: usize, bits: &[u8]) -> Result<Vec<Split>> {
    let order = canonical_order(n)?;
    if bits.len() != order.len() {
        return Err(Error::InvalidVector(format!(
            "binary vector has {} entries, expected {}",
            bits.len(),
            order.len()
        )));
    }
    Ok(order
        .splits()
        .iter()
        .zip(bits)
        .filter(|(_, &b)| b != 0)
        .map(|(s, _)| s.clone())
        .collect())
}

// ---------------------------------------------------------------------------
// Split vectors

/// Sparse coordinate vector of a tree: positive weights on compatible splits.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitVector {
    n: usize,
    entries: BTreeMap<Split, f64>,
}

impl SplitVector {
    pub fn empty(n: usize) -> Self {
        SplitVector {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// Validated constructor.
    pub fn new<I: IntoIterator<Item = (Split, f64)>>(n: usize, entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, w) in entries {
            if s.n != n {
                return Err(Error::SizeMismatch(s.n, n));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidVector(format!("weight {w} on {s} is not positive")));
            }
            if map.insert(s.clone(), w).is_some() {
                return Err(Error::InvalidVector(format!("split {s} listed twice")));
            }
        }
        let keys: Vec<Split> = map.keys().cloned().collect();
        if let Some((i, j)) = first_incompatible_pair(&keys) {
            return Err(Error::IncompatibleSplits(keys[i].to_string(), keys[j].to_string()));
        }
        if keys.len() > n.saturating_sub(2) {
            return Err(Error::InvalidVector(format!(
                "{} entries exceed the n-2={} internal edges of a tree",
                keys.len(),
                n.saturating_sub(2)
            )));
        }
        Ok(SplitVector { n, entries: map })
    }

    /// From 1-based canonical indices.
    pub fn from_indices<I: IntoIterator<Item = (u128, f64)>>(n: usize, entries: I) -> Result<Self> {
        let mut out = Vec::new();
        for (i, w) in entries {
            out.push((split_at(n, i)?, w));
        }
        SplitVector::new(n, out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &Split) -> Option<f64> {
        self.entries.get(s).copied()
    }

    /// Entries in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Split, f64)> + '_ {
        self.entries.iter().map(|(s, &w)| (s, w))
    }

    /// `(index, weight)` pairs in canonical order.
    pub fn indexed(&self) -> Result<Vec<(u128, f64)>> {
        self.iter().map(|(s, w)| Ok((split_index(s)?, w))).collect()
    }

    /// Euclidean norm of the weights.
    pub fn norm(&self) -> f64 {
        self.entries.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Dense 0/1 vector over the whole canonical order (small `n` only).
    pub fn binary(&self) -> Result<Vec<u8>> {
        let order = canonical_order(self.n)?;
        Ok(order
            .splits()
            .iter()
            .map(|s| u8::from(self.entries.contains_key(s)))
            .collect())
    }

    /// Inverse of [`SplitVector::binary`], every present split given weight 1.
    pub fn from_binary(n: usize, bits: &[u8]) -> Result<Self> {
        SplitVector::new(n, set_of_binary(n, bits)?.into_iter().map(|s| (s, 1.0)))
    }
}

/// Split-vector coordinates of `t`; zero-weight internal edges are dropped.
pub fn encode(t: &Tree) -> SplitVector {
    let entries = weighted_splits(t).into_iter().filter(|(_, w)| *w > 0.0).collect();
    SplitVector { n: t.n(), entries }
}

/// The unique minimal tree with the vector's splits and weights.
///
/// Leaf edges get weight 1.
pub fn split_to_tree(v: &SplitVector) -> Result<Tree> {
    let keys: Vec<Split> = v.entries.keys().cloned().collect();
    if let Some((i, j)) = first_incompatible_pair(&keys) {
        return Err(Error::IncompatibleSplits(keys[i].to_string(), keys[j].to_string()));
    }
    let clusters: Vec<(LabelBits, f64)> = v.iter().map(|(s, w)| (s.clade().clone(), w)).collect();
    Tree::from_clusters(v.n, &clusters, &|_| 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_newick;

    fn sp(n: usize, labels: &[usize]) -> Split {
        Split::from_labels(n, labels.iter().copied()).unwrap()
    }

    #[test]
    fn order_for_three_leaves() {
        let o = canonical_order(3).unwrap();
        let sides: Vec<Vec<usize>> = o.splits().iter().map(|s| s.side().to_vec()).collect();
        assert_eq!(sides, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        assert_eq!(split_index(&sp(3, &[0, 1])).unwrap(), 1);
        assert_eq!(split_index(&sp(3, &[0, 3])).unwrap(), 3);
    }

    #[test]
    fn order_for_four_leaves() {
        let o = canonical_order(4).unwrap();
        assert_eq!(o.len(), 10);
        assert_eq!(o.splits()[0].side().to_vec(), vec![0, 1]);
        assert_eq!(o.splits()[9].side().to_vec(), vec![3, 4]);
    }

    #[test]
    fn size_errors() {
        assert!(matches!(canonical_order(2), Err(Error::Size(_))));
        assert!(matches!(split_count(127), Err(Error::Overflow(_))));
    }

    #[test]
    fn order_matches_count_and_ranking() {
        for n in 3..=9 {
            let o = canonical_order(n).unwrap();
            assert_eq!(o.len() as u128, split_count(n).unwrap());
            for w in o.splits().windows(2) {
                assert!(w[0] < w[1]);
            }
            for (i, s) in o.splits().iter().enumerate() {
                assert_eq!(split_index(s).unwrap(), i as u128 + 1);
                assert_eq!(&split_at(n, i as u128 + 1).unwrap(), s);
            }
        }
    }

    #[test]
    fn ranking_survives_large_n() {
        let n = 126;
        let total = split_count(n).unwrap();
        for idx in [1, 2, total / 3, total / 2, total - 1, total] {
            let s = split_at(n, idx).unwrap();
            assert_eq!(split_index(&s).unwrap(), idx);
        }
    }

    #[test]
    fn canonical_side_choice() {
        // {1,2} vs {0,3}: tie at n=3, the block with 0 wins.
        assert_eq!(sp(3, &[1, 2]).side().to_vec(), vec![0, 3]);
        // Larger block given: the smaller complement is kept.
        assert_eq!(sp(4, &[0, 1, 2]).side().to_vec(), vec![3, 4]);
        assert!(matches!(Split::from_labels(4, [1]), Err(Error::Domain(_))));
        assert!(matches!(Split::from_labels(3, [0, 1, 2]), Err(Error::Domain(_))));
    }

    #[test]
    fn compatibility_examples() {
        let a = sp(3, &[0, 1]);
        let b = sp(3, &[0, 2]);
        assert!(compatible(&a, &a).unwrap());
        assert!(!compatible(&a, &b).unwrap());
        assert!(compatible(&sp(4, &[1, 2]), &sp(4, &[1, 2, 3])).unwrap());
        assert!(matches!(compatible(&a, &sp(4, &[1, 2])), Err(Error::SizeMismatch(3, 4))));
        assert!(is_compatible_set(&[]));
        assert!(!is_compatible_set(&[a, b]));
    }

    #[test]
    fn splits_of_cherry() {
        let t = parse_newick("((1,2),3);").unwrap();
        let s: Vec<_> = splits_of(&t).into_iter().collect();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].side().to_vec(), vec![0, 3]);
        assert!(splits_of(&parse_newick("(1,2,3,4);").unwrap()).is_empty());
    }

    #[test]
    fn encode_decode_small() {
        let t = parse_newick("((1:1,2:1):1,3:1);").unwrap();
        let v = encode(&t);
        assert_eq!(v.indexed().unwrap(), vec![(3, 1.0)]);
        let back = split_to_tree(&v).unwrap();
        assert_eq!(crate::tree::serialize_newick(&back), "((1:1,2:1):1,3:1);");
        let star = split_to_tree(&SplitVector::empty(4)).unwrap();
        assert_eq!(crate::tree::serialize_newick(&star), "(1:1,2:1,3:1,4:1);");
    }

    #[test]
    fn binary_vector_example() {
        let set = set_of_binary(3, &[1, 0, 1]).unwrap();
        assert_eq!(set, vec![sp(3, &[0, 1]), sp(3, &[0, 3])]);
        assert_eq!(binary_of_set(3, &set).unwrap(), vec![1, 0, 1]);
        let v = SplitVector::from_binary(3, &[1, 0, 1]);
        // {0,1} and {0,3} are incompatible, so this vector is not a tree.
        assert!(matches!(v, Err(Error::IncompatibleSplits(_, _))));
        let single = SplitVector::from_binary(3, &[0, 0, 1]).unwrap();
        assert_eq!(single.binary().unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn vector_validation() {
        assert!(matches!(
            SplitVector::from_indices(3, [(1, 1.0), (2, 1.0)]),
            Err(Error::IncompatibleSplits(_, _))
        ));
        assert!(matches!(
            SplitVector::from_indices(4, [(1, 0.0)]),
            Err(Error::InvalidVector(_))
        ));
        assert!(matches!(SplitVector::from_indices(3, [(4, 1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_weight_edges_are_dropped() {
        let t = parse_newick("(((1,2):0,3):2,4);").unwrap();
        let v = encode(&t);
        assert_eq!(v.len(), 1);
        assert_eq!(v.norm(), 2.0);
    }
}
