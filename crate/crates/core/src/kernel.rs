//! Fast h-fold sumset computation over a dense bit vector.
//!
//! For A with min(A) >= 0, membership of hA lives in bits 0..=h*max(A).
//! The iteration is S_1 = A, S_{i+1} = union over a in A of (S_i << a);
//! each step costs O(|A| * words) where words = h*max(A)/64, so a full
//! sumset is O(|A| * h * words). The range search calls this millions of
//! times through a reusable [`SumsetScratch`] to avoid reallocation.

use crate::error::{Error, Result};
use crate::math::binomial;
use crate::set::IntegerSet;

/// Default cap on the bit-vector length (2^26 bits = 8 MiB per buffer).
/// Exceeding it is reported as [`Error::Capacity`], never attempted.
pub const DEFAULT_BIT_CAPACITY: u64 = 1 << 26;

const BW: usize = 64;

/// Plain bit vector backed by u64 words. Words beyond `nbits` stay zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bits {
    words: Vec<u64>,
    nbits: usize,
}

impl Bits {
    fn from_words(words: Vec<u64>, nbits: usize) -> Self {
        debug_assert_eq!(words.len(), nbits.div_ceil(BW));
        Bits { words, nbits }
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        i < self.nbits && (self.words[i / BW] >> (i % BW)) & 1 != 0
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * BW + b)
                }
            })
        })
    }
}

/// Closed interval of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn len(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: lo <= hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// An h-fold sumset: membership bits, the maximal-interval decomposition,
/// and the cardinality. Produced by [`hfold_sumset`] and by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumsetValue {
    h: u32,
    bits: Bits,
    intervals: Vec<Interval>,
    cardinality: u64,
}

impl SumsetValue {
    fn from_bits(h: u32, bits: Bits) -> Self {
        let intervals = intervals_from_words(bits.words(), bits.len());
        let cardinality = bits.count_ones();
        debug_assert_eq!(
            cardinality,
            intervals.iter().map(Interval::len).sum::<u64>()
        );
        SumsetValue {
            h,
            bits,
            intervals,
            cardinality,
        }
    }

    /// Builds a value by setting bits one at a time from an explicit member
    /// list (sorted ascending, nonnegative, nonempty). The oracle uses this
    /// so its path shares nothing with the shift-or iteration.
    pub(crate) fn from_sorted_members(h: u32, members: &[i64]) -> Self {
        assert!(!members.is_empty() && members[0] >= 0);
        let nbits = *members.last().unwrap() as usize + 1;
        let mut words = vec![0u64; nbits.div_ceil(BW)];
        for &m in members {
            words[m as usize / BW] |= 1u64 << (m as usize % BW);
        }
        SumsetValue::from_bits(h, Bits::from_words(words, nbits))
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= 0 && self.bits.bit(n as usize)
    }

    /// Maximal disjoint intervals, ascending.
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.bits.iter_ones().map(|i| i as i64)
    }

    pub fn to_set(&self) -> IntegerSet {
        IntegerSet::new(self.iter().collect()).expect("sumsets are never empty")
    }
}

/// Decomposes a bit vector into maximal runs of set bits.
pub fn intervals_from_words(words: &[u64], nbits: usize) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < nbits {
        let (wi, bi) = (i / BW, i % BW);
        let w = words[wi];
        // Word-at-a-time skip when the whole word continues the current state.
        if bi == 0 && i + BW <= nbits {
            if w == 0 && start.is_none() {
                i += BW;
                continue;
            }
            if w == u64::MAX && start.is_some() {
                i += BW;
                continue;
            }
        }
        let set = (w >> bi) & 1 != 0;
        match (set, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(Interval {
                    lo: s as i64,
                    hi: i as i64 - 1,
                });
                start = None;
            }
            _ => {}
        }
        i += 1;
    }
    if let Some(s) = start {
        out.push(Interval {
            lo: s as i64,
            hi: nbits as i64 - 1,
        });
    }
    out
}

/// dst |= src << shift, where src is `src_words` live words. dst must have at
/// least shift/64 + src_words + 1 words.
#[inline]
fn shl_or(dst: &mut [u64], src: &[u64], shift: usize) {
    let q = shift / BW;
    let r = shift % BW;
    let n = src.len();
    if r == 0 {
        for (d, s) in dst[q..q + n].iter_mut().zip(src) {
            *d |= s;
        }
    } else {
        let mut prev = 0u64;
        for (d, &s) in dst[q..q + n].iter_mut().zip(src) {
            *d |= (s << r) | (prev >> (BW - r));
            prev = s;
        }
        dst[q + n] |= prev >> (BW - r);
    }
}

/// Reusable buffers for repeated sumset computations. Each worker thread in
/// the range search owns one.
#[derive(Debug, Default)]
pub struct SumsetScratch {
    cur: Vec<u64>,
    next: Vec<u64>,
}

impl SumsetScratch {
    pub fn new() -> Self {
        SumsetScratch::default()
    }

    /// Runs the shift-or iteration, leaving hA in `self.cur`. Returns the bit
    /// length h*max+1. When `fold_sizes` is given it receives |iA| for
    /// i = 0..=h. Elements must be sorted ascending with min >= 0.
    fn fill(
        &mut self,
        elems: &[i64],
        h: u32,
        cap: u64,
        mut fold_sizes: Option<&mut Vec<u64>>,
    ) -> Result<usize> {
        assert!(!elems.is_empty(), "sumset of an empty set is undefined");
        assert!(elems[0] >= 0, "sumset kernel requires min(A) >= 0");
        let max = *elems.last().unwrap() as u64;
        let required = h as u128 * max as u128 + 1;
        if required > cap as u128 {
            return Err(Error::Capacity {
                required,
                limit: cap,
            });
        }
        let final_bits = required as usize;
        // Slack words so shl_or can write its carry word unconditionally.
        let buf_words = final_bits.div_ceil(BW) + 2;
        if self.cur.len() < buf_words {
            self.cur.resize(buf_words, 0);
            self.next.resize(buf_words, 0);
        }
        if let Some(sizes) = fold_sizes.as_deref_mut() {
            sizes.clear();
            sizes.push(1); // |0A| = 1
        }
        if h == 0 {
            self.cur[0] = 1;
            for w in &mut self.cur[1..buf_words] {
                *w = 0;
            }
            return Ok(1);
        }
        // S_1 = A.
        let mut cur_bits = max as usize + 1;
        for w in &mut self.cur[..buf_words] {
            *w = 0;
        }
        for &a in elems {
            self.cur[a as usize / BW] |= 1u64 << (a as usize % BW);
        }
        if let Some(sizes) = fold_sizes.as_deref_mut() {
            sizes.push(elems.len() as u64);
        }
        for _step in 2..=h {
            let cur_words = cur_bits.div_ceil(BW);
            let horizon = (max as usize / BW + cur_words + 1).min(buf_words);
            if elems[0] == 0 {
                self.next[..cur_words].copy_from_slice(&self.cur[..cur_words]);
                for w in &mut self.next[cur_words..horizon] {
                    *w = 0;
                }
                for &a in &elems[1..] {
                    shl_or(&mut self.next, &self.cur[..cur_words], a as usize);
                }
            } else {
                for w in &mut self.next[..horizon] {
                    *w = 0;
                }
                for &a in elems {
                    shl_or(&mut self.next, &self.cur[..cur_words], a as usize);
                }
            }
            std::mem::swap(&mut self.cur, &mut self.next);
            cur_bits += max as usize;
            if let Some(sizes) = fold_sizes.as_deref_mut() {
                let w = cur_bits.div_ceil(BW);
                sizes.push(self.cur[..w].iter().map(|x| x.count_ones() as u64).sum());
            }
        }
        debug_assert_eq!(cur_bits, final_bits);
        Ok(final_bits)
    }

    /// |hA| without building a [`SumsetValue`].
    pub fn cardinality(&mut self, elems: &[i64], h: u32, cap: u64) -> Result<u64> {
        let nbits = self.fill(elems, h, cap, None)?;
        let w = nbits.div_ceil(BW);
        Ok(self.cur[..w].iter().map(|x| x.count_ones() as u64).sum())
    }

    /// |iA| for every fold i in 0..=h, written into `out`.
    pub fn fold_cardinalities(
        &mut self,
        elems: &[i64],
        h: u32,
        cap: u64,
        out: &mut Vec<u64>,
    ) -> Result<()> {
        self.fill(elems, h, cap, Some(out))?;
        Ok(())
    }

    fn value(&mut self, elems: &[i64], h: u32, cap: u64) -> Result<SumsetValue> {
        let nbits = self.fill(elems, h, cap, None)?;
        let words = self.cur[..nbits.div_ceil(BW)].to_vec();
        Ok(SumsetValue::from_bits(h, Bits::from_words(words, nbits)))
    }
}

/// Computes hA by iterated shift-or. Requires min(A) >= 0; h = 0 gives {0}.
pub fn hfold_sumset(a: &IntegerSet, h: u32) -> Result<SumsetValue> {
    hfold_sumset_with_capacity(a, h, DEFAULT_BIT_CAPACITY)
}

pub fn hfold_sumset_with_capacity(a: &IntegerSet, h: u32, cap: u64) -> Result<SumsetValue> {
    SumsetScratch::new().value(a.elements(), h, cap)
}

/// True when all h-fold sums of A are distinct as multisets are formed, i.e.
/// |hA| equals C(|A|+h-1, h). Works on any A via normalization.
pub fn is_bh_set(a: &IntegerSet, h: u32) -> Result<bool> {
    let expected = binomial(a.len() as u64 + h as u64 - 1, h as u64)?;
    let (n, _) = a.normalize();
    let value = hfold_sumset(&n, h)?;
    Ok(value.cardinality() == expected)
}
