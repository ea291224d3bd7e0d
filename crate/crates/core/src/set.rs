//! Finite sets of integers and the affine maps that act on them.
//!
//! `|hA|` is invariant under `A -> lambda*A + mu` (lambda != 0), so most
//! computations happen on the normalized representative: minimum 0, element
//! gcd 1. `canonical_form` additionally picks the reflection-minimal member
//! of the class, which is what the range search enumerates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::math::gcd;

/// A nonempty finite set of integers, stored strictly increasing.
/// Deliberately not `Ord`: order witnesses via `elements()` so the inherent
/// `min`/`max` accessors never collide with the `Ord` methods.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerSet {
    elements: Vec<i64>,
}

impl IntegerSet {
    /// Builds a set from arbitrary input: sorts, deduplicates, rejects empty.
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(IntegerSet { elements })
    }

    /// Elements must already be strictly increasing and nonempty.
    pub(crate) fn from_sorted(elements: Vec<i64>) -> Self {
        debug_assert!(!elements.is_empty());
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        IntegerSet { elements }
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: never empty
    }

    pub fn min(&self) -> i64 {
        self.elements[0]
    }

    pub fn max(&self) -> i64 {
        *self.elements.last().unwrap()
    }

    pub fn contains(&self, n: i64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    /// True when the elements form an arithmetic progression. Singletons and
    /// pairs count as progressions.
    pub fn is_arithmetic_progression(&self) -> bool {
        if self.elements.len() <= 2 {
            return true;
        }
        let d = self.elements[1] - self.elements[0];
        self.elements.windows(2).all(|w| w[1] - w[0] == d)
    }

    /// The reflected set (-1)*A, sorted ascending.
    pub fn reflect(&self) -> IntegerSet {
        let mut v: Vec<i64> = self.elements.iter().map(|&x| -x).collect();
        v.reverse();
        IntegerSet::from_sorted(v)
    }

    /// Consecutive differences; empty for singletons.
    pub fn gaps(&self) -> Vec<i64> {
        self.elements.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Returns the normalized set A' (min 0, gcd 1) and the map sending it
    /// back: A = lambda*A' + mu. Singletons normalize to {0}.
    pub fn normalize(&self) -> (IntegerSet, AffineMap) {
        let mu = self.min();
        if self.elements.len() == 1 {
            return (IntegerSet::from_sorted(vec![0]), AffineMap::new(1, mu));
        }
        let mut g: u64 = 0;
        for &x in &self.elements {
            g = gcd(g, (x - mu).unsigned_abs());
        }
        debug_assert!(g > 0);
        let lambda = g as i64;
        let v: Vec<i64> = self.elements.iter().map(|&x| (x - mu) / lambda).collect();
        (IntegerSet::from_sorted(v), AffineMap::new(lambda, mu))
    }

    pub fn is_normalized(&self) -> bool {
        let (n, map) = self.normalize();
        map.is_identity() && n == *self
    }

    /// The distinguished member of the affine class: normalized, and at most
    /// its reflection under the lexicographic order on gap sequences.
    pub fn canonical_form(&self) -> IntegerSet {
        let (fwd, _) = self.normalize();
        let (rev, _) = self.reflect().normalize();
        // Gap sequence of rev is the reverse of fwd's, so comparing the sets
        // elementwise is equivalent to comparing gap sequences lexicographically.
        if rev.elements < fwd.elements {
            rev
        } else {
            fwd
        }
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for IntegerSet {
    type Err = Error;

    /// Accepts `{n1, n2, ...}` with optional whitespace; negative entries are
    /// fine. A bare comma list without braces is also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = if let Some(rest) = t.strip_prefix('{') {
            rest.strip_suffix('}')
                .ok_or_else(|| Error::Parse(format!("missing closing brace in {t:?}")))?
        } else if t.contains('{') || t.contains('}') {
            return Err(Error::Parse(format!("mismatched braces in {t:?}")));
        } else {
            t
        };
        if inner.trim().is_empty() {
            return Err(Error::Parse("set literal has no elements".into()));
        }
        let mut v = Vec::new();
        for part in inner.split(',') {
            let p = part.trim();
            let n: i64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("invalid integer {p:?}")))?;
            v.push(n);
        }
        IntegerSet::new(v)
    }
}

/// The map x -> lambda*x + mu with lambda nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineMap {
    lambda: i64,
    mu: i64,
}

impl AffineMap {
    pub fn new(lambda: i64, mu: i64) -> Self {
        assert!(lambda != 0, "affine map requires lambda != 0");
        AffineMap { lambda, mu }
    }

    pub fn identity() -> Self {
        AffineMap { lambda: 1, mu: 0 }
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn mu(&self) -> i64 {
        self.mu
    }

    pub fn is_identity(&self) -> bool {
        self.lambda == 1 && self.mu == 0
    }

    pub fn apply(&self, set: &IntegerSet) -> IntegerSet {
        let mut v: Vec<i64> = set
            .elements()
            .iter()
            .map(|&x| self.lambda * x + self.mu)
            .collect();
        if self.lambda < 0 {
            v.reverse();
        }
        IntegerSet::from_sorted(v)
    }
}
