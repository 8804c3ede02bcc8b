//! Ground sets, subset bitmasks and the enumerations built on them.
//!
//! Every subset of the ground set `V = {0, .., n-1}` is a single `u64` word,
//! which caps `n` at 64. Exhaustive routines are only practical for much
//! smaller `n` (around 24).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 64;

/// A subset of the ground set, one bit per element.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask(pub u64);

impl Mask {
    pub const EMPTY: Mask = Mask(0);

    /// The full ground set `{0, .., n-1}`.
    #[inline]
    pub fn full(n: usize) -> Mask {
        debug_assert!(n <= MAX_ELEMENTS);
        if n >= 64 {
            Mask(u64::MAX)
        } else {
            Mask((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(v: usize) -> Mask {
        Mask(1u64 << v)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Mask {
        Mask(elements.into_iter().fold(0u64, |acc, v| acc | (1u64 << v)))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn union(self, other: Mask) -> Mask {
        Mask(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Mask) -> Mask {
        Mask(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Mask) -> Mask {
        Mask(self.0 & !other.0)
    }

    /// Complement within a ground set of size `n`.
    #[inline]
    pub fn complement(self, n: usize) -> Mask {
        Mask(!self.0 & Mask::full(n).0)
    }

    #[inline]
    pub fn is_subset(self, other: Mask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: Mask) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    #[inline]
    pub fn insert(self, v: usize) -> Mask {
        Mask(self.0 | (1u64 << v))
    }

    #[inline]
    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// True when no bit at position `>= n` is set.
    #[inline]
    pub fn fits(self, n: usize) -> bool {
        self.is_subset(Mask::full(n))
    }

    /// Element indices in ascending order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

// Masks travel as sorted element lists: `[0, 3, 5]`.
impl Serialize for Mask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

impl<'de> Deserialize<'de> for Mask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<usize>::deserialize(deserializer)?;
        if let Some(v) = elements.iter().find(|&&v| v >= MAX_ELEMENTS) {
            return Err(serde::de::Error::custom(format!("element {v} exceeds the 64-element cap")));
        }
        Ok(Mask::from_elements(elements))
    }
}

/// Iterator over the element indices of a [`Mask`].
#[derive(Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elements {}

/// A finite, labelled ground set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_ELEMENTS {
            return Err(Error::GroundSetTooLarge {
                n: labels.len(),
                max: MAX_ELEMENTS,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::InvalidInstance(format!("duplicate label {a:?}")));
            }
        }
        Ok(GroundSet { labels })
    }

    /// Ground set labelled `0, .., n-1`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full(&self) -> Mask {
        Mask::full(self.len())
    }

    pub fn label_set(&self, x: Mask) -> Vec<&str> {
        x.elements().map(|v| self.labels[v].as_str()).collect()
    }
}

/// All `2^n` subsets in ascending numeric order.
pub fn enumerate_subsets(n: usize) -> impl Iterator<Item = Mask> {
    assert!(n < 64, "exhaustive enumeration over {n} elements");
    (0..=Mask::full(n).0).map(Mask)
}

/// All subsets of `universe` with exactly `size` elements, ascending numerically.
pub fn subsets_of_size(universe: Mask, size: usize) -> impl Iterator<Item = Mask> {
    let free: Vec<usize> = universe.elements().collect();
    let m = free.len();
    let mut next = if size > m {
        None
    } else if size == 0 {
        Some(0u64)
    } else if size == 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << size) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack: next word with the same popcount.
            let c = cur & cur.wrapping_neg();
            cur.checked_add(c).and_then(|r| {
                let succ = (((r ^ cur) >> 2) / c) | r;
                (m == 64 || succ >> m == 0).then_some(succ)
            })
        };
        Some(deposit(cur, &free))
    })
}

/// Scatter the low bits of `compact` onto the positions in `positions`.
#[inline]
pub(crate) fn deposit(compact: u64, positions: &[usize]) -> Mask {
    let mut out = 0u64;
    let mut bits = compact;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        out |= 1u64 << positions[i];
        bits &= bits - 1;
    }
    Mask(out)
}

/// Every ordered pair `(S, T)` of disjoint subsets with `|S| <= k` and `|T| <= k`.
///
/// Order: ascending `|S|`, then `S` numerically, then `|T|`, then `T`
/// numerically. Downstream tie-breaking ("first wins") depends on it.
pub fn enumerate_st_pairs(n: usize, k: usize) -> impl Iterator<Item = (Mask, Mask)> {
    let full = Mask::full(n);
    let k = k.min(n);
    (0..=k).flat_map(move |s_size| {
        subsets_of_size(full, s_size).flat_map(move |s| {
            let rest = full.difference(s);
            (0..=k).flat_map(move |t_size| subsets_of_size(rest, t_size).map(move |t| (s, t)))
        })
    })
}

/// Binomial coefficient, saturating on overflow.
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).unwrap_or(u64::MAX)
}

/// Closed-form length of [`enumerate_st_pairs`]: `sum_{s,t<=k} C(n,s) C(n-s,t)`.
pub fn st_pair_count(n: usize, k: usize) -> u64 {
    let k = k.min(n);
    (0..=k)
        .map(|s| {
            (0..=k)
                .map(|t| binomial(n, s).saturating_mul(binomial(n - s, t)))
                .fold(0u64, u64::saturating_add)
        })
        .fold(0u64, u64::saturating_add)
}
