//! Exhaustive search for R(h, k) over canonical sets in [0, bound].
//!
//! The enumeration walks prefixes 0 = a_1 < a_2 < ... < a_k <= bound in
//! lexicographic order and keeps, per achieved size, the smallest witness.
//! A subtree is skipped only when provably useless: every size its
//! completions could realize already has a witness no larger than the
//! subtree's smallest leaf. The final table is therefore exactly the
//! pointwise-minimal witness map over the whole space, independent of shard
//! order, thread count, seeding, or a resume split: pruning consults only
//! real witnesses, and a real witness at or below a subtree's minimum leaf
//! proves the subtree cannot contribute.
//!
//! Size bounds for a prefix P with m_add elements still to place:
//! lower, |hP| + h * m_add (each new element exceeds max(P), so each fold
//! gains h fresh sums); upper, sum over i of |(h-i)P| * C(m_add+i-1, i)
//! (every h-fold sum splits into an (h-i)-fold sum of P and an i-multiset
//! of new elements).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{SumsetScratch, DEFAULT_BIT_CAPACITY};
use crate::math::{binomial, gcd};
use crate::set::IntegerSet;

use super::{
    completeness_bound, construction_members, maximum_size, minimum_size, RangeResult, Source,
};

/// Workers re-copy the shared witness table after this many window checks.
const REFRESH_EVERY: u64 = 4096;

/// Leaves are evaluated by direct multiset-sum enumeration when
/// C(h+k-1, h) is at most this; the bit-array kernel otherwise. Direct
/// enumeration costs O(C log C) per leaf regardless of max(A), which wins
/// for small k where the bit array spans h * max(A) bits.
const DIRECT_LEAF_MAX: u64 = 512;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub h: u32,
    pub k: u64,
    /// Elements are drawn from [0, bound].
    pub bound: i64,
    /// Worker threads; 0 uses the global rayon pool.
    pub jobs: usize,
    /// Pre-populate the witness table from the construction families. Never
    /// changes the result, only how fast pruning takes hold.
    pub seed_with_members: bool,
    /// Shards completed between checkpoint snapshots; 0 picks a size from
    /// the thread count and total shard count. Ignored when no checkpoint
    /// observer is installed (snapshots are then skipped altogether).
    pub progress_every: usize,
}

impl SearchConfig {
    pub fn new(h: u32, k: u64, bound: i64) -> Self {
        SearchConfig {
            h,
            k,
            bound,
            jobs: 0,
            seed_with_members: true,
            progress_every: 0,
        }
    }
}

/// Restartable search state: completed shard ids plus the witness table at
/// the time of the snapshot. Feeding a checkpoint back into
/// [`search_range_resumable`] skips the completed shards and provably
/// reproduces the uninterrupted result.
#[derive(Debug, Clone, Default)]
pub struct SearchCheckpoint {
    pub done: BTreeSet<u64>,
    pub best: BTreeMap<u64, IntegerSet>,
}

/// One unit of parallel work: all sets extending the prefix {0, a2} (k = 2:
/// the prefix is already complete) or {0, a2, a3}.
#[derive(Debug, Clone, Copy)]
struct Shard {
    a2: i64,
    a3: Option<i64>,
}

impl Shard {
    fn id(&self) -> u64 {
        (self.a2 as u64) << 32 | self.a3.unwrap_or(0) as u64
    }
}

struct WindowCtx {
    h: u32,
    k: usize,
    bound: i64,
    min_size: u64,
    /// C(h+k-1, h), or u64::MAX when that overflows.
    max_size: u64,
    /// Leaves go through [`count_distinct_sums`] instead of the kernel.
    direct_leaf: bool,
    /// coeff[m_add][i] = C(m_add+i-1, i), truncated where it exceeds
    /// max_size; m_add = 1 is computed on the fly (all ones).
    coeff: Vec<Vec<u64>>,
}

impl WindowCtx {
    fn new(h: u32, k: usize, bound: i64) -> Self {
        let max_size = maximum_size(h, k as u64).unwrap_or(u64::MAX);
        let mut coeff = Vec::with_capacity(k + 1);
        for m_add in 0..=k {
            let mut row = Vec::new();
            if m_add >= 2 {
                for i in 0..=h as u64 {
                    match binomial(m_add as u64 + i - 1, i) {
                        Ok(v) if v <= max_size => row.push(v),
                        _ => break,
                    }
                }
            }
            coeff.push(row);
        }
        WindowCtx {
            h,
            k,
            bound,
            min_size: minimum_size(h, k as u64),
            max_size,
            direct_leaf: max_size <= DIRECT_LEAF_MAX,
            coeff,
        }
    }

    fn coeff(&self, m_add: usize, i: usize) -> Option<u64> {
        if m_add == 1 {
            return Some(1);
        }
        self.coeff[m_add].get(i).copied()
    }

    /// [lb, ub] containing |hA| for every completion of the prefix, whose
    /// fold sizes |iP| are given.
    fn window(&self, m: usize, folds: &[u64]) -> (u64, u64) {
        let h = self.h as usize;
        let m_add = self.k - m;
        let lb = self
            .min_size
            .max(folds[h].saturating_add(self.h as u64 * m_add as u64));
        let mut ub: u128 = 0;
        let mut saturated = false;
        for i in 0..=h {
            match self.coeff(m_add, i) {
                Some(c) => ub += folds[h - i] as u128 * c as u128,
                None => {
                    saturated = true;
                    break;
                }
            }
            if ub >= self.max_size as u128 {
                saturated = true;
                break;
            }
        }
        let ub = if saturated { self.max_size } else { ub as u64 };
        debug_assert!(lb <= ub);
        (lb, ub)
    }
}

/// |hA| by listing every h-multiset sum of `elems` into `buf`, then
/// deduplicating. Elements must be nonnegative. Only sensible when
/// C(h+k-1, h) is small; see [`DIRECT_LEAF_MAX`].
fn count_distinct_sums(elems: &[i64], h: u32, buf: &mut Vec<u64>) -> u64 {
    fn rec(elems: &[i64], left: u32, acc: u64, buf: &mut Vec<u64>) {
        match elems {
            [last] => buf.push(acc + left as u64 * *last as u64),
            [first, rest @ ..] => {
                for c in 0..=left {
                    rec(rest, left - c, acc + c as u64 * *first as u64, buf);
                }
            }
            [] => unreachable!("leaves are nonempty"),
        }
    }
    debug_assert!(elems[0] >= 0);
    buf.clear();
    rec(elems, h, 0, buf);
    buf.sort_unstable();
    buf.dedup();
    buf.len() as u64
}

/// True when the gap sequence of `elems` is lexicographically no larger
/// than its reversal, i.e. the set is the chosen representative of its
/// reflection pair.
fn gaps_canonical(elems: &[i64]) -> bool {
    let n = elems.len();
    for i in 0..n - 1 {
        let fwd = elems[i + 1] - elems[i];
        let rev = elems[n - 1 - i] - elems[n - 2 - i];
        match fwd.cmp(&rev) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    true
}

/// Compares an existing witness against the smallest possible leaf below
/// the prefix `elems` (the prefix continued with consecutive integers).
fn witness_le_min_leaf(witness: &IntegerSet, elems: &[i64], k: usize) -> bool {
    let w = witness.elements();
    debug_assert_eq!(w.len(), k);
    let last = *elems.last().unwrap();
    for i in 0..k {
        let cand = if i < elems.len() {
            elems[i]
        } else {
            last + (i - elems.len() + 1) as i64
        };
        match w[i].cmp(&cand) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    true
}

struct Walker<'a> {
    ctx: &'a WindowCtx,
    table: &'a Mutex<BTreeMap<u64, IntegerSet>>,
    scratch: SumsetScratch,
    folds: Vec<u64>,
    sums: Vec<u64>,
    elems: Vec<i64>,
    /// gcds[i] = gcd of the gaps among elems[0..=i]; gcds[0] = 0.
    gcds: Vec<u64>,
    local: BTreeMap<u64, IntegerSet>,
    checks: u64,
}

impl<'a> Walker<'a> {
    fn new(ctx: &'a WindowCtx, table: &'a Mutex<BTreeMap<u64, IntegerSet>>) -> Self {
        Walker {
            ctx,
            table,
            scratch: SumsetScratch::new(),
            folds: Vec::new(),
            sums: Vec::new(),
            elems: Vec::new(),
            gcds: Vec::new(),
            local: table.lock().unwrap().clone(),
            checks: 0,
        }
    }

    fn push(&mut self, a: i64) {
        let g = gcd(
            *self.gcds.last().unwrap(),
            (a - self.elems.last().unwrap()) as u64,
        );
        self.elems.push(a);
        self.gcds.push(g);
    }

    fn pop(&mut self) {
        self.elems.pop();
        self.gcds.pop();
    }

    fn run_shard(&mut self, shard: Shard) -> Result<()> {
        self.elems.clear();
        self.gcds.clear();
        self.elems.extend([0, shard.a2]);
        self.gcds.extend([0, shard.a2 as u64]);
        if let Some(a3) = shard.a3 {
            self.push(a3);
        }
        if self.elems.len() == self.ctx.k {
            if *self.gcds.last().unwrap() == 1 {
                self.leaf()?;
            }
            return Ok(());
        }
        self.descend()
    }

    fn descend(&mut self) -> Result<()> {
        let m = self.elems.len();
        debug_assert!(m < self.ctx.k);
        if self.subtree_covered()? {
            return Ok(());
        }
        let prev = *self.elems.last().unwrap();
        if m + 1 == self.ctx.k {
            // Canonical representatives need the last gap to be at least the
            // first; smaller gcds cannot recover at this point either.
            for a in prev + self.elems[1]..=self.ctx.bound {
                if gcd(*self.gcds.last().unwrap(), (a - prev) as u64) != 1 {
                    continue;
                }
                self.push(a);
                self.leaf()?;
                self.pop();
            }
        } else {
            let hi = self.ctx.bound - (self.ctx.k - m - 1) as i64;
            for a in prev + 1..=hi {
                self.push(a);
                self.descend()?;
                self.pop();
            }
        }
        Ok(())
    }

    /// True when no completion of the current prefix can add a size or
    /// improve a witness, given the (possibly stale) local table view.
    fn subtree_covered(&mut self) -> Result<bool> {
        self.checks += 1;
        if self.checks.is_multiple_of(REFRESH_EVERY) {
            self.local = self.table.lock().unwrap().clone();
        }
        self.scratch.fold_cardinalities(
            &self.elems,
            self.ctx.h,
            DEFAULT_BIT_CAPACITY,
            &mut self.folds,
        )?;
        let (lb, ub) = self.ctx.window(self.elems.len(), &self.folds);
        if (self.local.len() as u64) < ub - lb + 1 {
            return Ok(false);
        }
        for t in lb..=ub {
            match self.local.get(&t) {
                None => return Ok(false),
                Some(w) => {
                    if !witness_le_min_leaf(w, &self.elems, self.ctx.k) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    fn leaf(&mut self) -> Result<()> {
        debug_assert_eq!(*self.gcds.last().unwrap(), 1);
        if !gaps_canonical(&self.elems) {
            return Ok(());
        }
        let size = if self.ctx.direct_leaf {
            count_distinct_sums(&self.elems, self.ctx.h, &mut self.sums)
        } else {
            self.scratch
                .cardinality(&self.elems, self.ctx.h, DEFAULT_BIT_CAPACITY)?
        };
        if size < self.ctx.min_size || size > self.ctx.max_size {
            return Err(Error::Inconsistency(format!(
                "|hA| = {size} outside [{}, {}] for A = {:?}",
                self.ctx.min_size, self.ctx.max_size, self.elems
            )));
        }
        let improving = match self.local.get(&size) {
            Some(cur) => self.elems.as_slice() < cur.elements(),
            None => true,
        };
        if !improving {
            return Ok(());
        }
        let mut table = self.table.lock().unwrap();
        let published = match table.get(&size) {
            Some(cur) if cur.elements() <= self.elems.as_slice() => cur.clone(),
            _ => {
                let w = IntegerSet::new(self.elems.clone()).expect("leaf sets are nonempty");
                table.insert(size, w.clone());
                w
            }
        };
        drop(table);
        self.local.insert(size, published);
        Ok(())
    }
}

fn shards(k: usize, bound: i64) -> Vec<Shard> {
    match k {
        // {0, a2} is normalized only for a2 = 1.
        2 => vec![Shard { a2: 1, a3: None }],
        // The third element is the last: apply the canonical narrowing
        // a3 - a2 >= a2 up front.
        3 => {
            let mut out = Vec::new();
            for a2 in 1..=bound / 2 {
                for a3 in 2 * a2..=bound {
                    out.push(Shard { a2, a3: Some(a3) });
                }
            }
            out
        }
        _ => {
            let mut out = Vec::new();
            for a2 in 1..=bound - (k as i64 - 2) {
                for a3 in a2 + 1..=bound - (k as i64 - 3) {
                    out.push(Shard { a2, a3: Some(a3) });
                }
            }
            out
        }
    }
}

fn validate(cfg: &SearchConfig) -> Result<()> {
    if cfg.k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if cfg.k > 64 {
        return Err(Error::InvalidConfig(
            "searches beyond k = 64 are not supported".into(),
        ));
    }
    if cfg.bound < cfg.k as i64 - 1 {
        return Err(Error::InvalidConfig(format!(
            "bound {} cannot hold {} distinct elements starting at 0",
            cfg.bound, cfg.k
        )));
    }
    if cfg.jobs > 512 {
        return Err(Error::InvalidConfig("jobs must be at most 512".into()));
    }
    let required = cfg.h as u128 * cfg.bound as u128 + 1;
    if required > DEFAULT_BIT_CAPACITY as u128 {
        return Err(Error::Capacity {
            required,
            limit: DEFAULT_BIT_CAPACITY,
        });
    }
    Ok(())
}

/// Exhaustive R(h, k) over sets in [0, bound]. The result is complete when
/// the bound reaches [`completeness_bound`].
pub fn search_range(cfg: &SearchConfig) -> Result<RangeResult> {
    run_search(cfg, None, None)
}

/// [`search_range`] with restart support: `resume` carries a previous
/// checkpoint (its witnesses are re-verified, never trusted), and
/// `on_checkpoint` observes a fresh snapshot plus the total shard count
/// after every completed chunk of shards.
pub fn search_range_resumable(
    cfg: &SearchConfig,
    resume: Option<&SearchCheckpoint>,
    mut on_checkpoint: impl FnMut(&SearchCheckpoint, usize),
) -> Result<RangeResult> {
    run_search(cfg, resume, Some(&mut on_checkpoint))
}

type CheckpointObserver<'a> = &'a mut dyn FnMut(&SearchCheckpoint, usize);

/// Snapshots cost O(|done| + |best|) each, so they are built only when an
/// observer is installed.
fn run_search(
    cfg: &SearchConfig,
    resume: Option<&SearchCheckpoint>,
    mut on_checkpoint: Option<CheckpointObserver<'_>>,
) -> Result<RangeResult> {
    validate(cfg)?;
    let k = cfg.k as usize;
    if k == 1 {
        return RangeResult::from_parts(
            cfg.h,
            1,
            BTreeSet::from([1]),
            BTreeMap::from([(1, IntegerSet::new(vec![0])?)]),
            Some(cfg.bound),
            true,
            Source::Search,
        );
    }

    let mut table: BTreeMap<u64, IntegerSet> = BTreeMap::new();
    let mut scratch = SumsetScratch::new();
    let offer = |table: &mut BTreeMap<u64, IntegerSet>, size: u64, w: IntegerSet| {
        table
            .entry(size)
            .and_modify(|cur| {
                if w.elements() < cur.elements() {
                    *cur = w.clone();
                }
            })
            .or_insert(w);
    };

    if cfg.seed_with_members && cfg.h >= 1 && cfg.k >= 3 {
        for m in construction_members(cfg.h, cfg.k)? {
            let (normalized, _) = m.witness.normalize();
            let w = normalized.canonical_form();
            if w.max() > cfg.bound {
                continue;
            }
            let size = scratch.cardinality(w.elements(), cfg.h, DEFAULT_BIT_CAPACITY)?;
            if size != m.size {
                return Err(Error::Inconsistency(format!(
                    "normalizing {} changed its sumset size from {} to {size}",
                    m.label, m.size
                )));
            }
            offer(&mut table, size, w);
        }
    }

    let mut done: BTreeSet<u64> = BTreeSet::new();
    if let Some(cp) = resume {
        for (&size, w) in &cp.best {
            let valid = w.len() == k
                && w.max() <= cfg.bound
                && w.is_normalized()
                && *w == w.canonical_form()
                && scratch.cardinality(w.elements(), cfg.h, DEFAULT_BIT_CAPACITY)? == size;
            if !valid {
                return Err(Error::Inconsistency(format!(
                    "checkpoint witness {w} for size {size} fails re-verification"
                )));
            }
            offer(&mut table, size, w.clone());
        }
        done = cp.done.clone();
    }

    let all = shards(k, cfg.bound);
    let total = all.len();
    let pending: Vec<Shard> = if done.is_empty() {
        all
    } else {
        all.into_iter().filter(|s| !done.contains(&s.id())).collect()
    };

    let table = Mutex::new(table);
    let ctx = WindowCtx::new(cfg.h, k, cfg.bound);
    let pool = if cfg.jobs > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.jobs)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?,
        )
    } else {
        None
    };
    let threads = if cfg.jobs > 0 {
        cfg.jobs
    } else {
        rayon::current_num_threads()
    };
    let chunk_size = match (&on_checkpoint, cfg.progress_every) {
        // No observer: one chunk, no snapshot overhead at all.
        (None, _) => pending.len().max(1),
        // Auto cadence, bounded below so huge runs snapshot at most ~64
        // times (each snapshot clones the done set).
        (Some(_), 0) => (threads * 64).clamp(64, 8192).max(pending.len() / 64 + 1),
        (Some(_), n) => n,
    };

    for chunk in pending.chunks(chunk_size) {
        let work = || {
            chunk.par_iter().try_for_each_init(
                || Walker::new(&ctx, &table),
                |walker, &shard| walker.run_shard(shard),
            )
        };
        match &pool {
            Some(p) => p.install(work)?,
            None => work()?,
        }
        if let Some(observe) = on_checkpoint.as_deref_mut() {
            done.extend(chunk.iter().map(Shard::id));
            let snapshot = SearchCheckpoint {
                done: done.clone(),
                best: table.lock().unwrap().clone(),
            };
            observe(&snapshot, total);
        }
    }

    let best = table.into_inner().unwrap();
    let sizes: BTreeSet<u64> = best.keys().copied().collect();
    let complete = completeness_bound(cfg.h, cfg.k)
        .is_ok_and(|b| cfg.bound as u128 >= b as u128);
    RangeResult::from_parts(cfg.h, cfg.k, sizes, best, Some(cfg.bound), complete, Source::Search)
}

/// The lexicographically smallest canonical k-element witness in [0, bound]
/// with |hA| exactly `target`, or None when no such set exists. Depth-first
/// in lex order, skipping subtrees whose size window misses the target, so
/// the first hit is the smallest witness.
pub fn find_witness(h: u32, k: u64, bound: i64, target: u64) -> Result<Option<IntegerSet>> {
    let cfg = SearchConfig::new(h, k, bound);
    validate(&cfg)?;
    if k == 1 {
        return Ok((target == 1).then(|| IntegerSet::new(vec![0]).unwrap()));
    }
    let ctx = WindowCtx::new(h, k as usize, bound);
    if target < ctx.min_size || target > ctx.max_size {
        return Ok(None);
    }
    let mut finder = Finder {
        ctx: &ctx,
        target,
        scratch: SumsetScratch::new(),
        folds: Vec::new(),
        sums: Vec::new(),
        elems: vec![0],
        gcds: vec![0],
    };
    finder.descend()
}

struct Finder<'a> {
    ctx: &'a WindowCtx,
    target: u64,
    scratch: SumsetScratch,
    folds: Vec<u64>,
    sums: Vec<u64>,
    elems: Vec<i64>,
    gcds: Vec<u64>,
}

impl Finder<'_> {
    fn descend(&mut self) -> Result<Option<IntegerSet>> {
        let m = self.elems.len();
        debug_assert!(m < self.ctx.k);
        if m >= 2 {
            self.scratch.fold_cardinalities(
                &self.elems,
                self.ctx.h,
                DEFAULT_BIT_CAPACITY,
                &mut self.folds,
            )?;
            let (lb, ub) = self.ctx.window(m, &self.folds);
            if self.target < lb || self.target > ub {
                return Ok(None);
            }
        }
        let prev = *self.elems.last().unwrap();
        if m + 1 == self.ctx.k {
            let lo = if m >= 2 { prev + self.elems[1] } else { prev + 1 };
            for a in lo..=self.ctx.bound {
                if gcd(*self.gcds.last().unwrap(), (a - prev) as u64) != 1 {
                    continue;
                }
                self.push(a);
                let hit = gaps_canonical(&self.elems) && {
                    let size = if self.ctx.direct_leaf {
                        count_distinct_sums(&self.elems, self.ctx.h, &mut self.sums)
                    } else {
                        self.scratch
                            .cardinality(&self.elems, self.ctx.h, DEFAULT_BIT_CAPACITY)?
                    };
                    size == self.target
                };
                if hit {
                    let w = IntegerSet::new(self.elems.clone())?;
                    self.pop();
                    return Ok(Some(w));
                }
                self.pop();
            }
        } else {
            let hi = self.ctx.bound - (self.ctx.k - m - 1) as i64;
            for a in prev + 1..=hi {
                self.push(a);
                if let Some(w) = self.descend()? {
                    self.pop();
                    return Ok(Some(w));
                }
                self.pop();
            }
        }
        Ok(None)
    }

    fn push(&mut self, a: i64) {
        let g = gcd(
            *self.gcds.last().unwrap(),
            (a - self.elems.last().unwrap()) as u64,
        );
        self.elems.push(a);
        self.gcds.push(g);
    }

    fn pop(&mut self) {
        self.elems.pop();
        self.gcds.pop();
    }
}

/// Every canonical normalized k-element subset of [0, bound], in lex order,
/// with no pruning. Exhaustive ground truth for testing the pruned search
/// on small instances.
pub fn enumerate_canonical(k: u64, bound: i64) -> Result<Vec<IntegerSet>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(vec![IntegerSet::new(vec![0])?]);
    }
    fn rec(elems: &mut Vec<i64>, g: u64, k: usize, bound: i64, out: &mut Vec<IntegerSet>) {
        if elems.len() == k {
            if g == 1 && gaps_canonical(elems) {
                out.push(IntegerSet::new(elems.clone()).unwrap());
            }
            return;
        }
        let prev = *elems.last().unwrap();
        let hi = bound - (k - elems.len() - 1) as i64;
        for a in prev + 1..=hi {
            elems.push(a);
            rec(elems, gcd(g, (a - prev) as u64), k, bound, out);
            elems.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0], 0, k as usize, bound, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::hfold_sumset;

    fn set(v: &[i64]) -> IntegerSet {
        IntegerSet::new(v.to_vec()).unwrap()
    }

    fn sizes_of(r: &RangeResult) -> Vec<u64> {
        r.sizes().iter().copied().collect()
    }

    #[test]
    fn search_3_3_at_the_complete_bound_is_exact() {
        let r = search_range(&SearchConfig::new(3, 3, 12)).unwrap();
        assert_eq!(sizes_of(&r), vec![7, 9, 10]);
        assert_eq!(*r.witness(7).unwrap(), set(&[0, 1, 2]));
        assert_eq!(*r.witness(9).unwrap(), set(&[0, 1, 3]));
        assert_eq!(*r.witness(10).unwrap(), set(&[0, 1, 4]));
        assert!(!r.is_complete()); // 12 < 575
    }

    #[test]
    fn search_2_4_fills_the_interval() {
        let r = search_range(&SearchConfig::new(2, 4, 15)).unwrap();
        assert_eq!(sizes_of(&r), (7..=10).collect::<Vec<u64>>());
        assert!(r.is_complete());
    }

    #[test]
    fn search_degenerate_parameters() {
        let r = search_range(&SearchConfig::new(1, 5, 6)).unwrap();
        assert_eq!(sizes_of(&r), vec![5]);
        assert!(r.is_complete());
        assert_eq!(*r.witness(5).unwrap(), set(&[0, 1, 2, 3, 4]));

        let r = search_range(&SearchConfig::new(4, 1, 3)).unwrap();
        assert_eq!(sizes_of(&r), vec![1]);

        let r = search_range(&SearchConfig::new(6, 2, 9)).unwrap();
        assert_eq!(sizes_of(&r), vec![7]);
        assert_eq!(*r.witness(7).unwrap(), set(&[0, 1]));

        let r = search_range(&SearchConfig::new(0, 3, 8)).unwrap();
        assert_eq!(sizes_of(&r), vec![1]);
        assert_eq!(*r.witness(1).unwrap(), set(&[0, 1, 2]));
    }

    #[test]
    fn search_matches_closed_form_at_4_3() {
        let r = search_range(&SearchConfig::new(4, 3, completeness_bound(4, 3).unwrap() as i64))
            .unwrap();
        assert_eq!(sizes_of(&r), vec![9, 12, 14, 15]);
        assert!(r.is_complete());
        let closed = super::super::closed_form_range(4, 3).unwrap().unwrap();
        assert_eq!(r.sizes(), closed.sizes());
        assert_eq!(r.witnesses(), closed.witnesses());
    }

    #[test]
    fn seeding_does_not_change_the_result() {
        let mut seeded = SearchConfig::new(3, 4, 40);
        seeded.seed_with_members = true;
        let mut bare = seeded.clone();
        bare.seed_with_members = false;
        let a = search_range(&seeded).unwrap();
        let b = search_range(&bare).unwrap();
        assert_eq!(a.sizes(), b.sizes());
        assert_eq!(a.witnesses(), b.witnesses());
    }

    #[test]
    fn thread_counts_do_not_change_the_result() {
        let mut cfg = SearchConfig::new(3, 4, 30);
        cfg.jobs = 1;
        let one = search_range(&cfg).unwrap();
        cfg.jobs = 4;
        let four = search_range(&cfg).unwrap();
        assert_eq!(one.sizes(), four.sizes());
        assert_eq!(one.witnesses(), four.witnesses());
    }

    #[test]
    fn resume_from_any_checkpoint_reproduces_the_result() {
        let mut cfg = SearchConfig::new(3, 4, 25);
        cfg.progress_every = 16;
        let direct = search_range(&cfg).unwrap();

        // Capture an early (strictly partial) checkpoint, then restart.
        let mut first: Option<SearchCheckpoint> = None;
        let mut totals = Vec::new();
        search_range_resumable(&cfg, None, |cp, total| {
            if first.is_none() {
                first = Some(cp.clone());
            }
            totals.push(total);
        })
        .unwrap();
        let cp = first.expect("at least one checkpoint");
        assert_eq!(cp.done.len(), 16);
        assert!(totals.iter().all(|&t| t == totals[0] && cp.done.len() < t));
        let resumed = search_range_resumable(&cfg, Some(&cp), |_, _| {}).unwrap();
        assert_eq!(direct.sizes(), resumed.sizes());
        assert_eq!(direct.witnesses(), resumed.witnesses());
    }

    #[test]
    fn corrupt_checkpoints_are_rejected() {
        let cfg = SearchConfig::new(3, 3, 12);
        let cp = SearchCheckpoint {
            done: BTreeSet::new(),
            best: BTreeMap::from([(8, set(&[0, 1, 3]))]),
        };
        assert!(matches!(
            search_range_resumable(&cfg, Some(&cp), |_, _| {}),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn growing_the_bound_never_loses_sizes() {
        let mut prev: BTreeSet<u64> = BTreeSet::new();
        for bound in 4..=14 {
            let r = search_range(&SearchConfig::new(3, 4, bound)).unwrap();
            assert!(prev.is_subset(r.sizes()), "bound={bound}");
            prev = r.sizes().clone();
        }
    }

    #[test]
    fn direct_leaf_evaluator_matches_the_kernel() {
        let mut buf = Vec::new();
        let mut wide = enumerate_canonical(4, 12).unwrap();
        wide.extend([
            set(&[0, 7, 19, 40, 66]),
            set(&[0, 100, 201]),
            set(&[0, 1, 63, 64]),
        ]);
        for a in &wide {
            for h in 0..=6 {
                let direct = count_distinct_sums(a.elements(), h, &mut buf);
                let kernel = hfold_sumset(a, h).unwrap().cardinality();
                assert_eq!(direct, kernel, "h={h} A={a}");
            }
        }
    }

    #[test]
    fn pruned_search_agrees_with_plain_enumeration() {
        // (5, 8, 9) pushes C(h+k-1, h) past the direct-leaf cutoff, so the
        // bit-array leaf path is covered too.
        for (h, k, bound) in [(2u32, 3u64, 9i64), (3, 4, 11), (4, 3, 13), (5, 2, 7), (5, 8, 9)] {
            let mut expect: BTreeMap<u64, IntegerSet> = BTreeMap::new();
            for a in enumerate_canonical(k, bound).unwrap() {
                let size = hfold_sumset(&a, h).unwrap().cardinality();
                expect
                    .entry(size)
                    .and_modify(|cur| {
                        if a.elements() < cur.elements() {
                            *cur = a.clone();
                        }
                    })
                    .or_insert(a);
            }
            let r = search_range(&SearchConfig::new(h, k, bound)).unwrap();
            assert_eq!(r.witnesses(), &expect, "h={h} k={k} bound={bound}");
        }
    }

    #[test]
    fn find_witness_returns_the_lex_smallest() {
        let w = find_witness(3, 3, 575, 9).unwrap().unwrap();
        assert_eq!(w, set(&[0, 1, 3]));
        let w = find_witness(3, 3, 575, 10).unwrap().unwrap();
        assert_eq!(w, set(&[0, 1, 4]));
        // 8 is not achievable at (3, 3).
        assert!(find_witness(3, 3, 575, 8).unwrap().is_none());
        // Targets outside [min, max] short-circuit.
        assert!(find_witness(3, 3, 575, 6).unwrap().is_none());
        assert!(find_witness(3, 3, 575, 11).unwrap().is_none());
    }

    #[test]
    fn canonical_enumeration_counts() {
        // k = 2: only {0, 1} is normalized.
        assert_eq!(enumerate_canonical(2, 10).unwrap().len(), 1);
        // Every enumerated set is its own canonical normalized form.
        for a in enumerate_canonical(4, 8).unwrap() {
            assert!(a.is_normalized());
            assert_eq!(a.canonical_form(), a);
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(search_range(&SearchConfig::new(3, 0, 10)).is_err());
        assert!(search_range(&SearchConfig::new(3, 5, 3)).is_err());
        assert!(search_range(&SearchConfig::new(1 << 20, 3, 1 << 20)).is_err());
    }
}
