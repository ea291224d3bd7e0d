//! Cross-cutting invariants exercised through the public API only.

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use sumrange::kernel::is_bh_set;
use sumrange::oracle::{composition_count, enumerate_compositions, sumset_by_definition};
use sumrange::range::{maximum_size, minimum_size, search_range, search_range_resumable};
use sumrange::range::{enumerate_canonical, SearchCheckpoint};
use sumrange::{hfold_sumset, IntegerSet, SearchConfig};

fn members(v: &sumrange::SumsetValue) -> BTreeSet<i64> {
    v.iter().collect()
}

/// All k-subsets of [0, n], no canonicity filter.
fn subsets(n: i64, k: usize) -> Vec<Vec<i64>> {
    fn rec(from: i64, n: i64, k: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in from..=n - (k - cur.len() - 1) as i64 {
            cur.push(a);
            rec(a + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Normalized sets only: 0 ∈ A ⊆ [0, n], |A| = k, gcd 1.
fn normalized_sets(n: i64, k: usize) -> Vec<IntegerSet> {
    subsets(n, k)
        .into_iter()
        .filter(|v| v[0] == 0)
        .map(|v| IntegerSet::new(v).unwrap())
        .filter(IntegerSet::is_normalized)
        .collect()
}

fn arb_set() -> impl Strategy<Value = IntegerSet> {
    prop::collection::btree_set(-60i64..=60, 1..=7)
        .prop_map(|s| IntegerSet::new(s.into_iter().collect()).unwrap())
}

proptest! {
    // |h(lambda*A + mu)| = |hA| for every lambda != 0.
    #[test]
    fn affine_invariance(a in arb_set(), lambda in -6i64..=6, mu in -100i64..=100, h in 0u32..=5) {
        prop_assume!(lambda != 0);
        let image: Vec<i64> = a.elements().iter().map(|&x| lambda * x + mu).collect();
        let image = IntegerSet::new(image).unwrap();
        let (na, _) = a.normalize();
        let (nb, _) = image.normalize();
        prop_assert_eq!(
            hfold_sumset(&na, h).unwrap().cardinality(),
            hfold_sumset(&nb, h).unwrap().cardinality()
        );
    }

    #[test]
    fn reflection_invariance(a in arb_set(), h in 0u32..=5) {
        let (na, _) = a.normalize();
        let (nr, _) = a.reflect().normalize();
        prop_assert_eq!(
            hfold_sumset(&na, h).unwrap().cardinality(),
            hfold_sumset(&nr, h).unwrap().cardinality()
        );
    }

    // h(k-1)+1 <= |hA| <= C(h+k-1, h), and |hA| <= |(h+1)A|.
    #[test]
    fn bounds_and_monotonicity(a in arb_set(), h in 1u32..=6) {
        let (na, _) = a.normalize();
        let k = na.len() as u64;
        let size = hfold_sumset(&na, h).unwrap().cardinality();
        prop_assert!(size >= minimum_size(h, k));
        prop_assert!(size <= maximum_size(h, k).unwrap());
        prop_assert!(size <= hfold_sumset(&na, h + 1).unwrap().cardinality());
    }

    // A B_h set achieves the maximum, and the maximum certifies a B_h set.
    #[test]
    fn bh_sets_are_exactly_the_maximizers(a in arb_set(), h in 1u32..=4) {
        let (na, _) = a.normalize();
        let size = hfold_sumset(&na, h).unwrap().cardinality();
        let max = maximum_size(h, na.len() as u64).unwrap();
        prop_assert_eq!(is_bh_set(&na, h).unwrap(), size == max);
    }

    // Rebuilding membership from the interval decomposition is lossless.
    #[test]
    fn interval_decomposition_round_trips(a in arb_set(), h in 0u32..=5) {
        let (na, _) = a.normalize();
        let v = hfold_sumset(&na, h).unwrap();
        let mut rebuilt = BTreeSet::new();
        let mut total = 0u64;
        for iv in v.intervals() {
            rebuilt.extend(iv.lo..=iv.hi);
            total += (iv.hi - iv.lo + 1) as u64;
        }
        prop_assert_eq!(total, v.cardinality());
        prop_assert_eq!(&rebuilt, &members(&v));
        for w in v.intervals().windows(2) {
            prop_assert!(w[0].hi + 1 < w[1].lo, "intervals must not touch");
        }
    }

    // Pairing composition coordinates with A's elements in any order gives
    // the same sumset.
    #[test]
    fn composition_pairing_is_permutation_invariant(
        a in arb_set(),
        h in 0u32..=4,
        seed in prop::collection::vec(0usize..1000, 7),
    ) {
        let (na, _) = a.normalize();
        let k = na.len();
        // A deterministic shuffle driven by the seed digits.
        let mut perm: Vec<i64> = na.elements().to_vec();
        for i in (1..k).rev() {
            perm.swap(i, seed[i] % (i + 1));
        }
        let shuffled: BTreeSet<i64> = enumerate_compositions(h, k as u32)
            .unwrap()
            .map(|c| c.dot(&perm))
            .collect();
        prop_assert_eq!(&shuffled, &members(&sumset_by_definition(&na, h).unwrap()));
    }
}

// |hA| = h(k-1)+1 exactly characterizes arithmetic progressions once h >= 2;
// for h <= 1 every set attains the minimum.
#[test]
fn minimum_characterization_exhaustive() {
    for k in 1..=5usize {
        for a in normalized_sets(20, k) {
            for h in 0..=4u32 {
                let size = hfold_sumset(&a, h).unwrap().cardinality();
                let min = minimum_size(h, k as u64);
                if h <= 1 {
                    assert_eq!(size, min, "h={h} A={a}");
                } else {
                    assert_eq!(
                        size == min,
                        a.is_arithmetic_progression(),
                        "h={h} A={a} size={size}"
                    );
                }
            }
        }
    }
}

// The slow definition-based oracle and the kernel agree on membership, not
// just cardinality, over an exhaustive small grid.
#[test]
fn oracle_equivalence_exhaustive() {
    for k in 1..=5usize {
        for a in normalized_sets(16, k) {
            for h in 0..=5u32 {
                let fast = hfold_sumset(&a, h).unwrap();
                let slow = sumset_by_definition(&a, h).unwrap();
                assert_eq!(members(&fast), members(&slow), "h={h} A={a}");
            }
        }
    }
}

#[test]
fn composition_streams_have_the_predicted_length() {
    for h in 0..=6u32 {
        for k in 1..=6u32 {
            let n = enumerate_compositions(h, k).unwrap().count() as u64;
            assert_eq!(n, composition_count(h, k).unwrap());
        }
    }
}

// Every k-subset of [0, N] is represented by exactly one enumerated
// canonical set, and the canonical sets reproduce the same size spectrum.
#[test]
fn canonical_enumeration_is_sound_and_complete() {
    let h = 3u32;
    for (k, n) in [(2usize, 9i64), (3, 12), (4, 12)] {
        let canon: HashSet<IntegerSet> =
            enumerate_canonical(k as u64, n).unwrap().into_iter().collect();
        let mut reached: HashSet<IntegerSet> = HashSet::new();
        let mut brute_sizes: BTreeSet<u64> = BTreeSet::new();
        for v in subsets(n, k) {
            let a = IntegerSet::new(v).unwrap();
            let c = a.normalize().0.canonical_form();
            assert!(canon.contains(&c), "missing canonical form {c} of {a}");
            reached.insert(c.clone());
            brute_sizes.insert(hfold_sumset(&c, h).unwrap().cardinality());
        }
        assert_eq!(reached, canon, "unreachable canonical sets at k={k} N={n}");

        let r = search_range(&SearchConfig::new(h, k as u64, n)).unwrap();
        assert_eq!(r.sizes(), &brute_sizes, "k={k} N={n}");
    }
}

// A checkpoint taken mid-run and replayed under a different thread count
// still reproduces the uninterrupted witness table.
#[test]
fn resumed_parallel_search_is_deterministic() {
    let mut cfg = SearchConfig::new(4, 4, 20);
    cfg.progress_every = 8;
    cfg.jobs = 2;
    let direct = search_range(&cfg).unwrap();

    let mut mid: Option<SearchCheckpoint> = None;
    search_range_resumable(&cfg, None, |cp, total| {
        if mid.is_none() && cp.done.len() * 2 >= total {
            mid = Some(cp.clone());
        }
    })
    .unwrap();
    let cp = mid.expect("mid-run checkpoint");

    let mut replay = cfg.clone();
    replay.jobs = 1;
    let resumed = search_range_resumable(&replay, Some(&cp), |_, _| {}).unwrap();
    assert_eq!(direct.sizes(), resumed.sizes());
    assert_eq!(direct.witnesses(), resumed.witnesses());
}
