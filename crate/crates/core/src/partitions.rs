//! Integer partitions as labels of conjugacy classes of the symmetric group.
//!
//! A [`Partition`] is stored as a map from part value to multiplicity, which is
//! the natural shape for the symmetry factor `Π i^{m_i} m_i!` and for adding
//! partitions together (disjoint union of cycle types).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::One;

/// A partition of a nonnegative integer, kept as `part -> multiplicity`.
///
/// Parts and multiplicities are always positive; the empty map is the unique
/// partition of zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: BTreeMap<u32, u32>,
}

impl Partition {
    /// The partition of zero.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partition from a list of parts in any order. Zero parts are ignored.
    pub fn from_parts(parts: &[u32]) -> Self {
        let mut map = BTreeMap::new();
        for &p in parts.iter().filter(|&&p| p > 0) {
            *map.entry(p).or_insert(0) += 1;
        }
        Self { parts: map }
    }

    /// Builds a partition from `(part, multiplicity)` pairs. Entries with a zero
    /// part or zero multiplicity are dropped; repeated parts accumulate.
    pub fn from_multiplicities<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut map = BTreeMap::new();
        for (part, mult) in pairs {
            if part > 0 && mult > 0 {
                *map.entry(part).or_insert(0) += mult;
            }
        }
        Self { parts: map }
    }

    /// The integer being partitioned, `Σ i·m_i`.
    pub fn weight(&self) -> u64 {
        self.parts
            .iter()
            .map(|(&p, &m)| u64::from(p) * u64::from(m))
            .sum()
    }

    /// Number of parts counted with multiplicity.
    pub fn len(&self) -> usize {
        self.parts.values().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicity(&self, part: u32) -> u32 {
        self.parts.get(&part).copied().unwrap_or(0)
    }

    /// `(part, multiplicity)` pairs in increasing part order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts.iter().map(|(&p, &m)| (p, m))
    }

    /// Parts in non-increasing order, each repeated by its multiplicity.
    pub fn to_parts(&self) -> Vec<u32> {
        self.parts
            .iter()
            .rev()
            .flat_map(|(&p, &m)| std::iter::repeat(p).take(m as usize))
            .collect()
    }

    /// Order of the centralizer of any permutation with this cycle type:
    /// `Π_i i^{m_i} · m_i!`. The empty partition has symmetry factor 1.
    pub fn sym_factor(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (&part, &mult) in &self.parts {
            acc *= BigUint::from(part).pow(mult);
            acc *= factorial(u64::from(mult));
        }
        acc
    }

    /// Size of the conjugacy class `C(μ)` in `S_n`, `n!/Sym(μ)`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.weight()) / self.sym_factor()
    }

    /// Multiplicity-wise sum; the cycle type of a product of disjoint permutations.
    pub fn sum(&self, other: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        for (&p, &m) in &other.parts {
            *parts.entry(p).or_insert(0) += m;
        }
        Partition { parts }
    }

    /// Adds `other` into `self` in place.
    pub fn absorb(&mut self, other: &Partition) {
        for (&p, &m) in &other.parts {
            *self.parts.entry(p).or_insert(0) += m;
        }
    }
}

impl Add for &Partition {
    type Output = Partition;

    fn add(self, rhs: &Partition) -> Partition {
        self.sum(rhs)
    }
}

impl Add for Partition {
    type Output = Partition;

    fn add(mut self, rhs: Partition) -> Partition {
        self.absorb(&rhs);
        self
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.to_parts().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Iterator over the partitions of `n` in descending lexicographic order of
/// their part lists: `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)` for `n = 4`.
///
/// `n = 0` yields the empty partition once.
#[derive(Clone, Debug)]
pub struct Partitions {
    current: Option<Vec<u32>>,
}

impl Partitions {
    pub fn new(n: u32) -> Self {
        let first = if n == 0 { Vec::new() } else { vec![n] };
        Self {
            current: Some(first),
        }
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let parts = self.current.take()?;
        let out = Partition::from_parts(&parts);
        self.current = next_descending(parts);
        Some(out)
    }
}

// Successor in descending lexicographic order; `None` after the all-ones partition.
fn next_descending(mut parts: Vec<u32>) -> Option<Vec<u32>> {
    let k = parts.iter().rposition(|&p| p > 1)?;
    // everything to the right of k is a 1
    let mut rem = (parts.len() - k - 1) as u32 + 1;
    parts[k] -= 1;
    let cap = parts[k];
    parts.truncate(k + 1);
    while rem > cap {
        parts.push(cap);
        rem -= cap;
    }
    if rem > 0 {
        parts.push(rem);
    }
    Some(parts)
}

/// All partitions of `n`, in the order produced by [`Partitions`].
pub fn partitions_of(n: u32) -> Vec<Partition> {
    Partitions::new(n).collect()
}
