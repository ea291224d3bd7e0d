//! Brute-force sumset evaluation by enumerating compositions.
//!
//! An h-fold sum of A = {a_1 < ... < a_k} is a dot product x . a where x is
//! a k-tuple of nonnegative integers summing to h. This module enumerates
//! those tuples directly and is the independent cross-check for the kernel:
//! it shares no code with the shift-or path. Deliberately unoptimized.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::kernel::SumsetValue;
use crate::math::binomial;
use crate::set::IntegerSet;

/// Refuse enumerations beyond this many compositions (about 10^8).
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// A k-tuple of nonnegative parts summing to h.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn h(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Dot product with a coefficient vector of the same length.
    pub fn dot(&self, coeffs: &[i64]) -> i64 {
        debug_assert_eq!(coeffs.len(), self.parts.len());
        self.parts
            .iter()
            .zip(coeffs)
            .map(|(&x, &a)| x as i64 * a)
            .sum()
    }
}

/// Number of k-part compositions of h: C(h+k-1, k-1).
pub fn composition_count(h: u32, k: u32) -> Result<u64> {
    binomial(h as u64 + k as u64 - 1, k as u64 - 1)
}

/// Lazily enumerates all compositions of h into k parts, ordered by the
/// reversed tuple (x_k, ..., x_1): for each value of the last part, all
/// tuples of the shorter prefix appear first. (2,2) yields (2,0), (1,1),
/// (0,2).
pub fn enumerate_compositions(h: u32, k: u32) -> Result<CompositionIter> {
    enumerate_compositions_with_cap(h, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_compositions_with_cap(h: u32, k: u32, cap: u64) -> Result<CompositionIter> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "compositions need at least one part".into(),
        ));
    }
    let count = composition_count(h, k)?;
    if count > cap {
        return Err(Error::EnumerationCap {
            count: count as u128,
            cap,
        });
    }
    Ok(CompositionIter {
        state: Some(init_state(h, k)),
    })
}

fn init_state(h: u32, k: u32) -> Vec<u32> {
    let mut parts = vec![0u32; k as usize];
    parts[0] = h; // all weight on the first part: the minimum in this order
    parts
}

pub struct CompositionIter {
    state: Option<Vec<u32>>,
}

impl Iterator for CompositionIter {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let parts = self.state.as_mut()?;
        let item = Composition {
            parts: parts.clone(),
        };
        // Advance the odometer: x_2 is the least significant digit, x_1 the
        // slack. When the slack is exhausted, carry into the next position.
        if parts.len() == 1 {
            self.state = None;
            return Some(item);
        }
        if parts[0] > 0 {
            parts[0] -= 1;
            parts[1] += 1;
        } else {
            // Carry: take the first nonzero position above the slack, move
            // one unit of it upward, and return the rest to the slack.
            let j = match parts.iter().skip(1).position(|&p| p != 0) {
                Some(off) => off + 1,
                None => {
                    self.state = None; // h = 0: the all-zero tuple is alone
                    return Some(item);
                }
            };
            if j + 1 == parts.len() {
                self.state = None; // (0,...,0,h) is the last tuple
                return Some(item);
            }
            let freed = parts[j];
            parts[j] = 0;
            parts[j + 1] += 1;
            parts[0] = freed - 1;
        }
        Some(item)
    }
}

/// hA computed entirely through composition enumeration. Requires
/// min(A) >= 0 so the result shares the kernel's representation.
pub fn sumset_by_definition(a: &IntegerSet, h: u32) -> Result<SumsetValue> {
    sumset_by_definition_with_cap(a, h, DEFAULT_ENUMERATION_CAP)
}

pub fn sumset_by_definition_with_cap(a: &IntegerSet, h: u32, cap: u64) -> Result<SumsetValue> {
    assert!(a.min() >= 0, "oracle sumset requires min(A) >= 0");
    let sums = dot_sums(a.elements(), h, cap)?;
    let members: Vec<i64> = sums.into_iter().collect();
    Ok(SumsetValue::from_sorted_members(h, &members))
}

/// All h-fold sums of `elems`, which may be in any order (the result is
/// order-independent).
pub fn dot_sums(elems: &[i64], h: u32, cap: u64) -> Result<BTreeSet<i64>> {
    let mut out = BTreeSet::new();
    for comp in enumerate_compositions_with_cap(h, elems.len() as u32, cap)? {
        out.insert(comp.dot(elems));
    }
    Ok(out)
}

/// The set { sum over j of (j-1)*x_j } across all k-part compositions of h.
/// Used as the offset set when a sumset of a progression of intervals is
/// assembled blockwise.
pub fn weighted_part_sums(h: u32, k: u32) -> Result<IntegerSet> {
    let coeffs: Vec<i64> = (0..k as i64).collect();
    let sums = dot_sums(&coeffs, h, DEFAULT_ENUMERATION_CAP)?;
    IntegerSet::new(sums.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::hfold_sumset;

    fn set(v: &[i64]) -> IntegerSet {
        IntegerSet::new(v.to_vec()).unwrap()
    }

    fn collect(h: u32, k: u32) -> Vec<Vec<u32>> {
        enumerate_compositions(h, k)
            .unwrap()
            .map(|c| c.parts().to_vec())
            .collect()
    }

    #[test]
    fn composition_order_matches_recursion_on_last_part() {
        assert_eq!(collect(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(
            collect(3, 3),
            vec![
                vec![3, 0, 0],
                vec![2, 1, 0],
                vec![1, 2, 0],
                vec![0, 3, 0],
                vec![2, 0, 1],
                vec![1, 1, 1],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![0, 1, 2],
                vec![0, 0, 3],
            ]
        );
        assert_eq!(collect(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(collect(4, 1), vec![vec![4]]);
    }

    #[test]
    fn composition_counts() {
        for h in 0..7u32 {
            for k in 1..6u32 {
                let got = collect(h, k).len() as u64;
                assert_eq!(got, composition_count(h, k).unwrap(), "h={h} k={k}");
            }
        }
        assert_eq!(composition_count(3, 3).unwrap(), 10);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        assert!(matches!(
            enumerate_compositions_with_cap(100, 10, 1000),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn oracle_matches_kernel_on_examples() {
        for (elems, h) in [
            (vec![0i64, 1, 3], 3u32),
            (vec![0, 1, 4], 3),
            (vec![0, 1, 2], 3),
            (vec![0, 2, 7, 11], 4),
            (vec![0, 5], 6),
            (vec![3], 2),
            (vec![1, 2], 2),
        ] {
            let a = set(&elems);
            let fast = hfold_sumset(&a, h).unwrap();
            let slow = sumset_by_definition(&a, h).unwrap();
            assert_eq!(slow.to_set(), fast.to_set(), "A={a} h={h}");
            assert_eq!(slow.cardinality(), fast.cardinality());
            assert_eq!(slow.h(), h);
        }
    }

    #[test]
    fn dot_sums_ignore_element_order() {
        let fwd = dot_sums(&[0, 1, 4, 9], 3, DEFAULT_ENUMERATION_CAP).unwrap();
        let rev = dot_sums(&[9, 4, 1, 0], 3, DEFAULT_ENUMERATION_CAP).unwrap();
        let mix = dot_sums(&[4, 0, 9, 1], 3, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(fwd, rev);
        assert_eq!(fwd, mix);
    }

    #[test]
    fn weighted_part_sums_small() {
        // k=1: only the empty weighting.
        assert_eq!(weighted_part_sums(5, 1).unwrap(), set(&[0]));
        // k=2: x_2 ranges over 0..=h.
        assert_eq!(
            weighted_part_sums(3, 2).unwrap(),
            set(&[0, 1, 2, 3])
        );
    }
}
