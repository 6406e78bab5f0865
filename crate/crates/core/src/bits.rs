//! Fixed-width bitsets over the label universe `{0, 1, ..., n}`.

use std::fmt;

const WORD: usize = 64;

/// A set of labels drawn from `{0..=n}`, stored as packed 64-bit words.
///
/// Two sets built for the same `n` always have the same word count, so the
/// derived equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelBits {
    words: Vec<u64>,
}

impl LabelBits {
    /// Empty set able to hold labels `0..=n`.
    pub fn empty(n: usize) -> Self {
        LabelBits {
            words: vec![0; n / WORD + 1],
        }
    }

    /// `{0, 1, ..., n}`.
    pub fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for l in 0..=n {
            b.insert(l);
        }
        b
    }

    /// `{1, ..., n}`: every leaf label, root excluded.
    pub fn leaves(n: usize) -> Self {
        let mut b = Self::full(n);
        b.remove(0);
        b
    }

    pub fn from_labels<I: IntoIterator<Item = usize>>(n: usize, labels: I) -> Self {
        let mut b = Self::empty(n);
        for l in labels {
            b.insert(l);
        }
        b
    }

    pub fn singleton(n: usize, label: usize) -> Self {
        let mut b = Self::empty(n);
        b.insert(label);
        b
    }

    #[inline]
    pub fn insert(&mut self, label: usize) {
        self.words[label / WORD] |= 1u64 << (label % WORD);
    }

    #[inline]
    pub fn remove(&mut self, label: usize) {
        self.words[label / WORD] &= !(1u64 << (label % WORD));
    }

    #[inline]
    pub fn contains(&self, label: usize) -> bool {
        self.words
            .get(label / WORD)
            .is_some_and(|w| w & (1u64 << (label % WORD)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        LabelBits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        LabelBits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    /// Complement relative to `universe`.
    pub fn complement_in(&self, universe: &Self) -> Self {
        universe.difference(self)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// True when `self ∪ other` covers all of `universe`.
    #[inline]
    pub fn covers_with(&self, other: &Self, universe: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .zip(&universe.words)
            .all(|((a, b), u)| u & !(a | b) == 0)
    }

    pub fn min_label(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Smallest label in the symmetric difference, if any.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a != *b)
            .map(|(i, (a, b))| i * WORD + (a ^ b).trailing_zeros() as usize)
    }

    /// Labels in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * WORD + t)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for LabelBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LabelBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, l) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra_across_word_boundary() {
        let n = 130;
        let a = LabelBits::from_labels(n, [0, 63, 64, 129]);
        let b = LabelBits::from_labels(n, [64, 100]);
        assert_eq!(a.len(), 4);
        assert_eq!(a.intersection(&b).to_vec(), vec![64]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 63, 129]);
        assert_eq!(a.first_difference(&b), Some(0));
        assert!(!a.is_disjoint(&b));
        assert!(LabelBits::singleton(n, 100).is_subset(&b));
        assert_eq!(a.min_label(), Some(0));
        assert_eq!(LabelBits::empty(n).min_label(), None);
    }

    #[test]
    fn covers_with_detects_full_union() {
        let u = LabelBits::full(4);
        let a = LabelBits::from_labels(4, [0, 1, 2]);
        let b = LabelBits::from_labels(4, [2, 3, 4]);
        assert!(a.covers_with(&b, &u));
        assert!(!a.covers_with(&LabelBits::singleton(4, 3), &u));
    }

    #[test]
    fn display_lists_ascending() {
        assert_eq!(LabelBits::from_labels(5, [3, 0, 5]).to_string(), "{0,3,5}");
    }
}
