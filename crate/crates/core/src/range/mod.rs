//! The set of achievable sumset sizes R(h, k) = { |hA| : |A| = k }.
//!
//! R(h, k) is affine-invariant, so it suffices to consider normalized sets
//! (min 0, gcd of gaps 1), and every member has a reflection-canonical
//! witness. Results come from three routes that check each other: closed
//! forms where they exist, exhaustive search over canonical sets up to a
//! bound, and the construction families. [`merge`] combines routes and
//! [`verify_structure`] re-checks the invariants every result must satisfy.

pub mod search;

use std::collections::{BTreeMap, BTreeSet};

use crate::constructions::{members_from_progressions, members_from_two_intervals, FamilyMember};
use crate::error::{Error, Result};
use crate::kernel::{is_bh_set, SumsetScratch, DEFAULT_BIT_CAPACITY};
use crate::math::binomial;
use crate::set::IntegerSet;

pub use search::{
    enumerate_canonical, find_witness, search_range, search_range_resumable, SearchCheckpoint,
    SearchConfig,
};

/// Closed forms carry witnesses only up to this k at h = 2; beyond it the
/// per-size witness searches get expensive and the caller must bound-search.
pub const H2_CLOSED_FORM_MAX_K: u64 = 16;

/// Smallest achievable |hA| over k-element sets: h(k-1) + 1, the size of
/// h-fold sums of an arithmetic progression.
pub fn minimum_size(h: u32, k: u64) -> u64 {
    h as u64 * (k - 1) + 1
}

/// Largest achievable |hA|: C(h+k-1, h), attained exactly by B_h sets.
pub fn maximum_size(h: u32, k: u64) -> Result<u64> {
    binomial(h as u64 + k - 1, h as u64)
}

/// A search bound that provably captures every size: all of R(h, k) has
/// witnesses inside [0, completeness_bound(h, k)].
///
/// h <= 1 or k <= 2 admit only one size, so any k-element domain works;
/// h = 2 has witnesses inside [0, 2^k - 1]; otherwise [0, 4(4h)^(k-1) - 1]
/// suffices.
pub fn completeness_bound(h: u32, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if h <= 1 || k <= 2 {
        return Ok(k - 1);
    }
    if h == 2 {
        if k >= 64 {
            return Err(Error::Overflow {
                what: "completeness bound",
            });
        }
        return Ok((1u64 << k) - 1);
    }
    let base = 4u128 * h as u128;
    let mut pow = 1u128;
    for _ in 0..k - 1 {
        pow = pow.checked_mul(base).ok_or(Error::Overflow {
            what: "completeness bound",
        })?;
    }
    u64::try_from(4 * pow - 1).map_err(|_| Error::Overflow {
        what: "completeness bound",
    })
}

/// How a [`RangeResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    Search,
    Constructions,
    Combined,
}

/// R(h, k) or a verified subset of it, with one witness per size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeResult {
    h: u32,
    k: u64,
    sizes: BTreeSet<u64>,
    witnesses: BTreeMap<u64, IntegerSet>,
    search_bound: Option<i64>,
    complete: bool,
    source: Source,
}

impl RangeResult {
    /// Assembles a result, re-verifying every invariant: one witness per
    /// size, each witness a normalized canonical k-element set whose h-fold
    /// sumset has exactly the claimed size. Callers loading untrusted data
    /// (caches, checkpoints) get fail-closed validation for free.
    pub fn from_parts(
        h: u32,
        k: u64,
        sizes: BTreeSet<u64>,
        witnesses: BTreeMap<u64, IntegerSet>,
        search_bound: Option<i64>,
        complete: bool,
        source: Source,
    ) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Inconsistency("a size range cannot be empty".into()));
        }
        if !sizes.iter().eq(witnesses.keys()) {
            return Err(Error::Inconsistency(
                "sizes and witness keys must match exactly".into(),
            ));
        }
        let mut scratch = SumsetScratch::new();
        for (&size, w) in &witnesses {
            if w.len() as u64 != k {
                return Err(Error::Inconsistency(format!(
                    "witness {w} for size {size} has {} elements, wants {k}",
                    w.len()
                )));
            }
            if !w.is_normalized() || *w != w.canonical_form() {
                return Err(Error::Inconsistency(format!(
                    "witness {w} for size {size} is not in canonical form"
                )));
            }
            let actual = scratch.cardinality(w.elements(), h, DEFAULT_BIT_CAPACITY)?;
            if actual != size {
                return Err(Error::Inconsistency(format!(
                    "witness {w} claims size {size} but |{h}A| = {actual}"
                )));
            }
        }
        Ok(RangeResult {
            h,
            k,
            sizes,
            witnesses,
            search_bound,
            complete,
            source,
        })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn sizes(&self) -> &BTreeSet<u64> {
        &self.sizes
    }

    pub fn witnesses(&self) -> &BTreeMap<u64, IntegerSet> {
        &self.witnesses
    }

    pub fn witness(&self, size: u64) -> Option<&IntegerSet> {
        self.witnesses.get(&size)
    }

    pub fn min_size(&self) -> u64 {
        *self.sizes.first().unwrap()
    }

    pub fn max_size(&self) -> u64 {
        *self.sizes.last().unwrap()
    }

    /// The element bound the search enumerated up to, when a search ran.
    pub fn search_bound(&self) -> Option<i64> {
        self.search_bound
    }

    /// True when `sizes` is provably all of R(h, k).
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn source(&self) -> Source {
        self.source
    }
}

fn interval_witness(k: u64) -> IntegerSet {
    IntegerSet::new((0..k as i64).collect()).expect("k >= 1")
}

/// R(h, k) in closed form where one is known, with witnesses:
///
/// * k = 1: {1}; k = 2: {h+1}; h = 0: {1}; h = 1: {k};
/// * h = 2: the full interval [2k-1, k(k+1)/2] (witnesses up to
///   [`H2_CLOSED_FORM_MAX_K`]);
/// * k = 3: { C(h+2,2) - C(l,2) : 1 <= l <= h } with witnesses
///   {0, 1, h+2-l}.
///
/// Other (h, k) return None and need a search.
pub fn closed_form_range(h: u32, k: u64) -> Result<Option<RangeResult>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k > 10_000_000 {
        return Err(Error::InvalidConfig(
            "k too large to materialize witnesses".into(),
        ));
    }
    let single = |size: u64, w: IntegerSet| -> Result<Option<RangeResult>> {
        let result = RangeResult::from_parts(
            h,
            k,
            BTreeSet::from([size]),
            BTreeMap::from([(size, w)]),
            None,
            true,
            Source::ClosedForm,
        )?;
        Ok(Some(result))
    };
    if k == 1 {
        return single(1, IntegerSet::new(vec![0])?);
    }
    if k == 2 {
        return single(h as u64 + 1, IntegerSet::new(vec![0, 1])?);
    }
    if h == 0 {
        return single(1, interval_witness(k));
    }
    if h == 1 {
        return single(k, interval_witness(k));
    }
    if h == 2 {
        if k > H2_CLOSED_FORM_MAX_K {
            return Ok(None);
        }
        let lo = 2 * k - 1;
        let hi = binomial(k + 1, 2)?;
        let bound = (1i64 << k) - 1;
        let mut witnesses = BTreeMap::new();
        for t in lo..=hi {
            let w = find_witness(2, k, bound, t)?.ok_or_else(|| {
                Error::Inconsistency(format!(
                    "size {t} in [{lo},{hi}] has no witness inside [0,{bound}]"
                ))
            })?;
            witnesses.insert(t, w);
        }
        let result = RangeResult::from_parts(
            2,
            k,
            (lo..=hi).collect(),
            witnesses,
            None,
            true,
            Source::ClosedForm,
        )?;
        return Ok(Some(result));
    }
    if k == 3 {
        let full = binomial(h as u64 + 2, 2)?;
        let mut sizes = BTreeSet::new();
        let mut witnesses = BTreeMap::new();
        for l in 1..=h as u64 {
            let size = full - binomial(l, 2)?;
            let w = IntegerSet::new(vec![0, 1, h as i64 + 2 - l as i64])?;
            sizes.insert(size);
            witnesses.insert(size, w);
        }
        let result =
            RangeResult::from_parts(h, k, sizes, witnesses, None, true, Source::ClosedForm)?;
        return Ok(Some(result));
    }
    Ok(None)
}

/// Combines routes into one result. Any present route must agree with the
/// others: sizes from an incomplete route must be a subset of a complete
/// route's sizes, and two complete routes must coincide. Witnesses are the
/// lexicographically smallest offered for each size.
pub fn merge(
    h: u32,
    k: u64,
    closed: Option<&RangeResult>,
    searched: Option<&RangeResult>,
    members: &[FamilyMember],
) -> Result<RangeResult> {
    for r in [&closed, &searched].into_iter().flatten() {
        if r.h() != h || r.k() != k {
            return Err(Error::Inconsistency(format!(
                "cannot merge a result for ({}, {}) into ({h}, {k})",
                r.h(),
                r.k()
            )));
        }
    }
    if closed.is_none() && searched.is_none() && members.is_empty() {
        return Err(Error::InvalidConfig("nothing to merge".into()));
    }

    let mut sizes: BTreeSet<u64> = BTreeSet::new();
    let mut witnesses: BTreeMap<u64, IntegerSet> = BTreeMap::new();
    let mut offer = |size: u64, w: IntegerSet| {
        witnesses
            .entry(size)
            .and_modify(|cur| {
                if w.elements() < cur.elements() {
                    *cur = w.clone();
                }
            })
            .or_insert(w);
    };

    let mut member_sizes: BTreeSet<u64> = BTreeSet::new();
    for m in members {
        let (normalized, _) = m.witness.normalize();
        offer(m.size, normalized.canonical_form());
        member_sizes.insert(m.size);
    }
    sizes.extend(member_sizes.iter().copied());
    for r in [closed, searched].into_iter().flatten() {
        for (&size, w) in r.witnesses() {
            offer(size, w.clone());
        }
        sizes.extend(r.sizes().iter().copied());
    }

    for complete in [closed, searched].into_iter().flatten() {
        if !complete.is_complete() {
            continue;
        }
        if !member_sizes.is_subset(complete.sizes()) {
            return Err(Error::Inconsistency(format!(
                "constructions realize sizes outside the complete range for ({h}, {k})"
            )));
        }
        for other in [closed, searched].into_iter().flatten() {
            let ok = if other.is_complete() {
                other.sizes() == complete.sizes()
            } else {
                other.sizes().is_subset(complete.sizes())
            };
            if !ok {
                return Err(Error::Inconsistency(format!(
                    "disagreeing size ranges for ({h}, {k}): {:?} vs {:?}",
                    complete.sizes(),
                    other.sizes()
                )));
            }
        }
    }

    let complete = closed.is_some_and(|r| r.is_complete())
        || searched.is_some_and(|r| r.is_complete());
    let search_bound = searched.and_then(|r| r.search_bound());
    let kinds = [closed.is_some(), searched.is_some(), !members.is_empty()]
        .iter()
        .filter(|&&b| b)
        .count();
    let source = if kinds > 1 {
        Source::Combined
    } else if closed.is_some() {
        Source::ClosedForm
    } else if searched.is_some() {
        Source::Search
    } else {
        Source::Constructions
    };
    RangeResult::from_parts(h, k, sizes, witnesses, search_bound, complete, source)
}

/// One invariant check on a [`RangeResult`].
#[derive(Debug, Clone)]
pub struct StructureCheck {
    pub name: &'static str,
    /// False when the invariant does not constrain this (h, k) or this
    /// result; such checks never fail.
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify_structure`].
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub checks: Vec<StructureCheck>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| !c.applicable || c.passed)
    }
}

/// Re-checks everything known about the shape of R(h, k) against a result:
/// the exact minimum with its progression witness, the B_h maximum, the
/// forbidden interval below hk, the presence of hk itself, and kernel
/// agreement of every witness. Checks that need completeness downgrade to
/// bound checks on partial results.
pub fn verify_structure(r: &RangeResult) -> StructureReport {
    let (h, k) = (r.h(), r.k());
    let mut checks = Vec::new();

    let expected_min = minimum_size(h, k);
    let min_ok = r.min_size() == expected_min;
    // For h >= 2 only arithmetic progressions attain the minimum, so the
    // canonical witness must be the interval; h <= 1 admits any witness.
    let min_witness_ok = h < 2
        || r.witness(expected_min)
            .is_some_and(|w| *w == interval_witness(k));
    checks.push(StructureCheck {
        name: "minimum",
        applicable: true,
        passed: min_ok && min_witness_ok,
        detail: format!(
            "min {} (expected {expected_min}), witness {}",
            r.min_size(),
            r.witness(expected_min)
                .map_or_else(|| "absent".to_string(), |w| w.to_string()),
        ),
    });

    match maximum_size(h, k) {
        Ok(expected_max) => {
            let (passed, detail) = if r.is_complete() {
                let witness_is_bh = h < 2
                    || r
                        .witness(expected_max)
                        .is_some_and(|w| is_bh_set(w, h).unwrap_or(false));
                (
                    r.max_size() == expected_max && witness_is_bh,
                    format!(
                        "max {} (expected {expected_max}), witness attains all distinct sums: {}",
                        r.max_size(),
                        witness_is_bh
                    ),
                )
            } else {
                (
                    r.max_size() <= expected_max,
                    format!("max {} <= {expected_max}", r.max_size()),
                )
            };
            checks.push(StructureCheck {
                name: "maximum",
                applicable: true,
                passed,
                detail,
            });
        }
        Err(_) => checks.push(StructureCheck {
            name: "maximum",
            applicable: false,
            passed: true,
            detail: "maximum exceeds u64".to_string(),
        }),
    }

    let gap_lo = expected_min + 1;
    let gap_hi = h as u64 * k - 1;
    let gap_applicable = h >= 3 && k >= 3;
    let in_gap: Vec<u64> = if gap_applicable {
        r.sizes().range(gap_lo..=gap_hi).copied().collect()
    } else {
        Vec::new()
    };
    checks.push(StructureCheck {
        name: "forbidden-interval",
        applicable: gap_applicable,
        passed: in_gap.is_empty(),
        detail: if gap_applicable {
            format!("sizes in [{gap_lo},{gap_hi}]: {in_gap:?}")
        } else {
            "empty below h = 3 or k = 3".to_string()
        },
    });

    let hk = h as u64 * k;
    let hk_applicable = h >= 1
        && k >= 3
        && (r.is_complete() || r.search_bound().is_none_or(|n| n >= k as i64));
    checks.push(StructureCheck {
        name: "first-size-above-gap",
        applicable: hk_applicable,
        passed: !hk_applicable || r.sizes().contains(&hk),
        detail: format!("hk = {hk}"),
    });

    let mut scratch = SumsetScratch::new();
    let mut bad = Vec::new();
    for (&size, w) in r.witnesses() {
        let ok = w.len() as u64 == k
            && scratch
                .cardinality(w.elements(), h, DEFAULT_BIT_CAPACITY)
                .is_ok_and(|n| n == size);
        if !ok {
            bad.push(size);
        }
    }
    checks.push(StructureCheck {
        name: "witnesses",
        applicable: true,
        passed: bad.is_empty() && r.sizes().len() == r.witnesses().len(),
        detail: format!(
            "{} witnesses, failing sizes: {bad:?}",
            r.witnesses().len()
        ),
    });

    let missing: Vec<u64> = (r.min_size()..=r.max_size())
        .filter(|t| !r.sizes().contains(t))
        .collect();
    checks.push(StructureCheck {
        name: "span-holes",
        applicable: false,
        passed: true,
        detail: if missing.len() > 24 {
            format!("{} sizes absent inside the span", missing.len())
        } else {
            format!("absent inside the span: {missing:?}")
        },
    });

    StructureReport { checks }
}

/// Construction members from both families, deduplicated by size with the
/// smallest witness kept. Families that do not apply at this (h, k)
/// contribute nothing.
pub fn construction_members(h: u32, k: u64) -> Result<Vec<FamilyMember>> {
    let mut by_size: BTreeMap<u64, FamilyMember> = BTreeMap::new();
    let mut take = |ms: Vec<FamilyMember>| {
        for m in ms {
            by_size
                .entry(m.size)
                .and_modify(|cur| {
                    if m.witness.elements() < cur.witness.elements() {
                        *cur = m.clone();
                    }
                })
                .or_insert(m);
        }
    };
    if h >= 1 && k >= 1 {
        take(members_from_progressions(h, k)?);
    }
    if h >= 2 && k >= 3 {
        take(members_from_two_intervals(h, k)?);
    }
    Ok(by_size.into_values().collect())
}
