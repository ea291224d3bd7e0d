//! Subcommand implementations.
//!
//! stdout carries only the deterministic results; progress, timings, and
//! cache notes go to stderr so identical runs stay byte-identical. Exit
//! codes: 0 success, 1 operational error, 2 a structural theorem check
//! failed (which means a defect, not bad input).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sumrange::constructions::{ProgressionOfIntervalsSpec, TwoIntervalSpec};
use sumrange::kernel::DEFAULT_BIT_CAPACITY;
use sumrange::oracle::{sumset_by_definition, weighted_part_sums};
use sumrange::range::{
    closed_form_range, completeness_bound, construction_members, merge, search_range_resumable,
    verify_structure, RangeResult, Source, StructureReport,
};
use sumrange::{hfold_sumset, IntegerSet, SearchConfig};

use crate::cache;
use crate::config::resolve_cache_dir;
use crate::formats::{
    atlas_to_csv, atlas_to_json, atlas_to_text, entry_from_result, entry_summary_line,
    failed_entry, AtlasEntry, AtlasFile, SCHEMA_VERSION,
};

const EXIT_OK: i32 = 0;
const EXIT_CHECK_FAILED: i32 = 2;

/// Work lists above this many shards do not fit in memory.
const MAX_SHARDS: u128 = 100_000_000;

#[derive(Parser)]
#[command(
    name = "sumrange",
    version,
    about = "h-fold sumsets of finite integer sets: kernels, constructive families, and size-range atlases"
)]
pub struct Cli {
    /// Cache directory (overrides SUMRANGE_CACHE_DIR and sumrange.json)
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute hA for a set literal like '{0,1,3}' (or bare 0,1,3)
    Sumset(SumsetArgs),
    /// Build one constructive family member and check its size formula
    Construct(ConstructArgs),
    /// Compute R(h, k): achieved sizes, witnesses, and structure checks
    Range(RangeArgs),
    /// Batch R(h, k) over a grid into an atlas
    Atlas(AtlasArgs),
    /// Run the built-in invariant suite
    Verify,
}

#[derive(Args)]
pub struct SumsetArgs {
    /// Set literal; negatives allowed
    #[arg(allow_hyphen_values = true)]
    pub set: String,
    /// Fold count
    pub h: u32,
    /// Cross-check against the definition-based oracle
    #[arg(long)]
    pub oracle: bool,
    /// List every maximal interval on its own line
    #[arg(long)]
    pub intervals: bool,
}

#[derive(Args)]
pub struct ConstructArgs {
    /// Family: progression | two-interval
    pub family: String,
    /// key=value parameters: progression takes a, l, b, h;
    /// two-interval takes a, b, c, h
    pub params: Vec<String>,
}

#[derive(Args)]
pub struct RangeArgs {
    pub h: u32,
    pub k: u64,
    /// Search bound N: witnesses drawn from [0, N]
    #[arg(long, conflicts_with = "complete")]
    pub bound: Option<i64>,
    /// Search to the provable completeness bound
    #[arg(long)]
    pub complete: bool,
    /// Worker threads; 0 uses all cores
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write checkpoints and continue from an existing one
    #[arg(long)]
    pub resume: bool,
    /// Write the result as a single-entry atlas JSON file
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Draw COUNT random sets instead of searching exhaustively
    #[arg(long, value_name = "COUNT", requires = "bound", conflicts_with_all = ["complete", "resume"])]
    pub sample: Option<u64>,
    /// RNG seed for --sample (default 0)
    #[arg(long, requires = "sample")]
    pub seed: Option<u64>,
    /// Skip the result cache
    #[arg(long)]
    pub no_cache: bool,
    /// Shards between progress reports / checkpoint snapshots
    #[arg(long, value_name = "SHARDS")]
    pub progress_every: Option<usize>,
}

#[derive(Args)]
pub struct AtlasArgs {
    /// h values: "2", "1..3", or "1-3" (inclusive)
    #[arg(long = "h", value_name = "RANGE")]
    pub h_range: String,
    /// k values, same syntax
    #[arg(long = "k", value_name = "RANGE")]
    pub k_range: String,
    /// Fixed search bound for every cell
    #[arg(long, conflicts_with = "complete")]
    pub bound: Option<i64>,
    /// Search every cell to its completeness bound
    #[arg(long)]
    pub complete: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write the atlas JSON here as well
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Skip the result cache
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

pub fn run(cli: Cli) -> anyhow::Result<i32> {
    let cache_dir = resolve_cache_dir(cli.cache_dir)?;
    match cli.command {
        Command::Sumset(args) => run_sumset(&args),
        Command::Construct(args) => run_construct(&args),
        Command::Range(args) => run_range(&cache_dir, &args),
        Command::Atlas(args) => run_atlas(&cache_dir, &args),
        Command::Verify => run_verify(),
    }
}

fn run_sumset(args: &SumsetArgs) -> anyhow::Result<i32> {
    let set = IntegerSet::from_str(&args.set)?;
    // The kernel wants nonnegative elements; translating by -min shifts
    // hA by exactly h * min, undone below when printing.
    let min = set.min();
    let shifted = IntegerSet::new(set.elements().iter().map(|&x| x - min).collect())?;
    let value = hfold_sumset(&shifted, args.h)?;
    let offset = args.h as i64 * min;

    let mut line = format!("size {}", value.cardinality());
    if args.oracle {
        let slow = sumset_by_definition(&shifted, args.h)?;
        let same = slow.cardinality() == value.cardinality()
            && slow.iter().eq(value.iter())
            && slow.intervals() == value.intervals();
        if !same {
            bail!("oracle disagrees with the kernel on {set} at h = {}", args.h);
        }
        line.push_str("; oracle agrees");
    } else {
        line.push_str("; intervals");
        for iv in value.intervals() {
            write!(line, " [{},{}]", iv.lo + offset, iv.hi + offset).unwrap();
        }
    }
    println!("{line}");
    if args.intervals {
        for iv in value.intervals() {
            println!("[{},{}]", iv.lo + offset, iv.hi + offset);
        }
    }
    Ok(EXIT_OK)
}

fn parse_params(raw: &[String], keys: &[&str]) -> anyhow::Result<BTreeMap<String, u64>> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
        let key = if key == "ell" { "l" } else { key };
        if !keys.contains(&key) {
            bail!("unknown parameter {key:?}; expected {}", keys.join(", "));
        }
        let value: u64 = value
            .parse()
            .with_context(|| format!("parameter {key}={value:?} is not a nonnegative integer"))?;
        if out.insert(key.to_string(), value).is_some() {
            bail!("parameter {key:?} given twice");
        }
    }
    for key in keys {
        if !out.contains_key(*key) {
            bail!("missing parameter {key}=...");
        }
    }
    Ok(out)
}

fn run_construct(args: &ConstructArgs) -> anyhow::Result<i32> {
    let (label, witness, predicted, h) = match args.family.as_str() {
        "progression" => {
            let p = parse_params(&args.params, &["a", "l", "b", "h"])?;
            let h: u32 = p["h"].try_into().context("h is too large")?;
            let spec = ProgressionOfIntervalsSpec::new(p["a"], p["l"], p["b"])?;
            let label = format!("progression a={} l={} b={} h={h}", p["a"], p["l"], p["b"]);
            (label, spec.build()?, spec.predicted_size(h)?, h)
        }
        "two-interval" => {
            let p = parse_params(&args.params, &["a", "b", "c", "h"])?;
            let h: u32 = p["h"].try_into().context("h is too large")?;
            let spec = TwoIntervalSpec::new(p["a"], p["b"], p["c"])?;
            let label = format!("two-interval a={} b={} c={} h={h}", p["a"], p["b"], p["c"]);
            (label, spec.build()?, spec.predicted_size(h)?, h)
        }
        other => bail!("unknown family {other:?}; expected progression or two-interval"),
    };
    let kernel = hfold_sumset(&witness, h)?.cardinality();
    let verdict = if kernel == predicted { "verified" } else { "MISMATCH" };
    println!("{label}: witness {witness}, predicted {predicted}, kernel {kernel}, {verdict}");
    Ok(if kernel == predicted { EXIT_OK } else { 1 })
}

/// How a range computation picks its search bound.
enum NPolicy {
    Complete,
    Bound(i64),
    ClosedOnly,
}

struct Computed {
    merged: RangeResult,
    report: StructureReport,
}

/// Execution knobs shared by range and atlas runs.
struct RunOptions {
    jobs: usize,
    no_cache: bool,
    resume: bool,
    progress_every: Option<usize>,
}

fn shard_estimate(k: u64, bound: i64) -> u128 {
    let n = bound.max(0) as u128;
    match k {
        0..=2 => 1,
        3 => n * n / 4 + 1,
        _ => n * n / 2 + 1,
    }
}

fn search_feasibility(h: u32, k: u64, bound: i64) -> Result<(), String> {
    let bits = h as u128 * bound as u128 + 1;
    if bits > DEFAULT_BIT_CAPACITY as u128 {
        return Err(format!(
            "h*N+1 = {bits} bits exceeds the kernel capacity of {DEFAULT_BIT_CAPACITY}"
        ));
    }
    let est = shard_estimate(k, bound);
    if est > MAX_SHARDS {
        return Err(format!(
            "about {est} search shards exceed the supported {MAX_SHARDS}"
        ));
    }
    Ok(())
}

/// Closed form, exhaustive search, and construction members for (h, k),
/// merged and structure-checked. Search results round-trip through the
/// cache keyed by (h, k, N, code version).
fn compute_range(
    dir: &Path,
    h: u32,
    k: u64,
    policy: NPolicy,
    opts: &RunOptions,
) -> anyhow::Result<Computed> {
    let closed = closed_form_range(h, k)?;
    let members = construction_members(h, k)?;

    let bound = match policy {
        NPolicy::Bound(n) => Some(n),
        NPolicy::ClosedOnly => None,
        NPolicy::Complete => {
            let n = completeness_bound(h, k)
                .map_err(|e| anyhow!("no usable completeness bound for ({h}, {k}): {e}; pass --bound"))?;
            let n = i64::try_from(n)
                .map_err(|_| anyhow!("completeness bound for ({h}, {k}) overflows; pass --bound"))?;
            match search_feasibility(h, k, n) {
                Ok(()) => Some(n),
                Err(reason) if closed.is_some() => {
                    eprintln!(
                        "warning: exhaustive search to N = {n} is not feasible ({reason}); relying on the closed form"
                    );
                    None
                }
                Err(reason) => bail!("search to the completeness bound N = {n} is not feasible: {reason}"),
            }
        }
    };

    let searched = match bound {
        None => None,
        Some(n) => {
            search_feasibility(h, k, n).map_err(|reason| anyhow!("search at N = {n}: {reason}"))?;
            let mut cached = None;
            if !opts.no_cache {
                let mut notes = Vec::new();
                match cache::load_range(dir, h, k, n, &mut notes) {
                    Ok(hit) => cached = hit,
                    Err(e) => eprintln!("cache: ignoring unusable entry: {e:#}"),
                }
                for note in notes {
                    eprintln!("cache: {note}");
                }
            }
            match cached {
                Some(r) => {
                    eprintln!("cache: hit for ({h}, {k}) at N = {n} (revalidated)");
                    Some(r)
                }
                None => {
                    let mut cfg = SearchConfig::new(h, k, n);
                    cfg.jobs = opts.jobs;
                    if let Some(p) = opts.progress_every {
                        cfg.progress_every = p;
                    }
                    let start = Instant::now();
                    let checkpoint = if opts.resume {
                        cache::load_checkpoint(dir, h, k, n)?
                    } else {
                        if let Ok(Some(_)) = cache::load_checkpoint(dir, h, k, n) {
                            eprintln!("note: a checkpoint for this run exists; pass --resume to continue it");
                        }
                        None
                    };
                    if let Some(cp) = &checkpoint {
                        eprintln!("resume: {} shards already done", cp.done.len());
                    }
                    let observe = opts.resume || opts.progress_every.is_some();
                    let r = if observe {
                        search_range_resumable(&cfg, checkpoint.as_ref(), |cp, total| {
                            eprintln!("progress: {}/{total} shards", cp.done.len());
                            if opts.resume {
                                if let Err(e) = cache::store_checkpoint(dir, h, k, n, cp) {
                                    eprintln!("warning: checkpoint write failed: {e:#}");
                                }
                            }
                        })?
                    } else {
                        sumrange::range::search_range(&cfg)?
                    };
                    eprintln!("timing: search ({h}, {k}) at N = {n} took {:.3?}", start.elapsed());
                    if opts.resume {
                        let _ = cache::remove_checkpoint(dir, h, k, n);
                    }
                    if !opts.no_cache {
                        cache::store_range(dir, &r, None)
                            .with_context(|| format!("storing cache under {}", dir.display()))?;
                    }
                    Some(r)
                }
            }
        }
    };

    if closed.is_none() && searched.is_none() {
        bail!("no closed form covers ({h}, {k}); pass --bound N or --complete");
    }
    let merged = merge(h, k, closed.as_ref(), searched.as_ref(), &members)?;
    let report = verify_structure(&merged);
    Ok(Computed { merged, report })
}

fn structure_lines(report: &StructureReport, out: &mut String) {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for c in &report.checks {
        if !c.applicable {
            continue;
        }
        parts.push(format!("{} {}", c.name, if c.passed { "ok" } else { "FAIL" }));
        if !c.passed {
            failures.push(format!("  FAIL {}: {}", c.name, c.detail));
        }
    }
    if parts.is_empty() {
        out.push_str("structure: no applicable checks\n");
    } else {
        writeln!(out, "structure: {}", parts.join(", ")).unwrap();
    }
    for f in failures {
        out.push_str(&f);
        out.push('\n');
    }
}

fn print_range_result(merged: &RangeResult, report: &StructureReport) {
    let entry = entry_from_result(merged, Some(report));
    let mut out = String::new();
    out.push_str(&entry_summary_line(&entry));
    out.push('\n');
    structure_lines(report, &mut out);
    out.push_str("witnesses:\n");
    for (size, w) in merged.witnesses() {
        writeln!(out, "  {size} {w}").unwrap();
    }
    print!("{out}");
}

fn write_entry_file(path: &Path, entry: AtlasEntry) -> anyhow::Result<()> {
    let atlas = AtlasFile {
        schema_version: SCHEMA_VERSION,
        generator: format!("sumrange {}", cache::CODE_VERSION),
        entries: vec![entry],
    };
    cache::write_atomic(path, atlas_to_json(&atlas).as_bytes())
}

fn run_range(dir: &Path, args: &RangeArgs) -> anyhow::Result<i32> {
    if let Some(count) = args.sample {
        return run_sample(args, count);
    }
    let policy = match (args.complete, args.bound) {
        (true, _) => NPolicy::Complete,
        (false, Some(n)) => NPolicy::Bound(n),
        (false, None) => bail!("pass --bound N or --complete"),
    };
    let opts = RunOptions {
        jobs: args.jobs,
        no_cache: args.no_cache,
        resume: args.resume,
        progress_every: args.progress_every,
    };
    let Computed { merged, report } = compute_range(dir, args.h, args.k, policy, &opts)?;
    print_range_result(&merged, &report);
    if let Some(path) = &args.out {
        write_entry_file(path, entry_from_result(&merged, Some(&report)))?;
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Randomized exploration: COUNT random k-subsets of [0, N], canonicalized
/// and kernel-sized. Only ever a lower bound, so the result is
/// complete=false and the exhaustive structure checks are skipped.
fn run_sample(args: &RangeArgs, count: u64) -> anyhow::Result<i32> {
    let n = args.bound.expect("clap enforces --bound with --sample");
    if count == 0 {
        bail!("--sample needs a positive count");
    }
    if n < args.k as i64 - 1 {
        bail!("bound {n} cannot hold {} distinct elements", args.k);
    }
    search_feasibility(args.h, 2, n).map_err(|reason| anyhow!("sampling at N = {n}: {reason}"))?;
    let seed = args.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: BTreeMap<u64, IntegerSet> = BTreeMap::new();
    let universe = (n + 1) as usize;
    let k = args.k as usize;
    for _ in 0..count {
        let picks = rand::seq::index::sample(&mut rng, universe, k);
        let elems: Vec<i64> = picks.iter().map(|i| i as i64).collect();
        let canonical = IntegerSet::new(elems)?.normalize().0.canonical_form();
        let size = hfold_sumset(&canonical, args.h)?.cardinality();
        best.entry(size)
            .and_modify(|cur| {
                if canonical.elements() < cur.elements() {
                    *cur = canonical.clone();
                }
            })
            .or_insert(canonical);
    }
    let sizes = best.keys().copied().collect();
    let sampled = RangeResult::from_parts(
        args.h,
        args.k,
        sizes,
        best,
        Some(n),
        false,
        Source::Search,
    )?;
    eprintln!("sample: {count} draws, seed {seed}; structure checks skipped for sampled results");
    let entry = entry_from_result(&sampled, None);
    println!("{}", entry_summary_line(&entry));
    println!("witnesses:");
    for (size, w) in sampled.witnesses() {
        println!("  {size} {w}");
    }
    if let Some(path) = &args.out {
        write_entry_file(path, entry)?;
    }
    Ok(EXIT_OK)
}

fn parse_range_spec(spec: &str) -> anyhow::Result<(u64, u64)> {
    let (lo, hi) = if let Some((lo, hi)) = spec.split_once("..") {
        (lo, hi)
    } else if let Some((lo, hi)) = spec.split_once('-') {
        (lo, hi)
    } else {
        (spec, spec)
    };
    let lo: u64 = lo.trim().parse().with_context(|| format!("bad range {spec:?}"))?;
    let hi: u64 = hi.trim().parse().with_context(|| format!("bad range {spec:?}"))?;
    Ok((lo, hi))
}

fn run_atlas(dir: &Path, args: &AtlasArgs) -> anyhow::Result<i32> {
    let (h_lo, h_hi) = parse_range_spec(&args.h_range)?;
    let (k_lo, k_hi) = parse_range_spec(&args.k_range)?;
    if h_lo > h_hi || k_lo > k_hi {
        bail!("empty range");
    }

    let mut entries = Vec::new();
    let mut any_failed = false;
    let mut any_check_failed = false;
    for h in h_lo..=h_hi {
        let h = u32::try_from(h).context("h is too large")?;
        for k in k_lo..=k_hi {
            let policy = match (args.complete, args.bound) {
                (true, _) => NPolicy::Complete,
                (false, Some(n)) => NPolicy::Bound(n),
                (false, None) => NPolicy::ClosedOnly,
            };
            let opts = RunOptions {
                jobs: args.jobs,
                no_cache: args.no_cache,
                resume: false,
                progress_every: None,
            };
            match compute_range(dir, h, k, policy, &opts) {
                Ok(Computed { merged, report }) => {
                    any_check_failed |= !report.all_passed();
                    entries.push(entry_from_result(&merged, Some(&report)));
                }
                Err(e) => {
                    any_failed = true;
                    eprintln!("atlas: ({h}, {k}) failed: {e:#}");
                    entries.push(failed_entry(h, k, &format!("{e:#}")));
                }
            }
        }
    }

    let atlas = AtlasFile {
        schema_version: SCHEMA_VERSION,
        generator: format!("sumrange {}", cache::CODE_VERSION),
        entries,
    };
    match args.format {
        OutputFormat::Text => print!("{}", atlas_to_text(&atlas)),
        OutputFormat::Json => print!("{}", atlas_to_json(&atlas)),
        OutputFormat::Csv => print!("{}", atlas_to_csv(&atlas)),
    }
    if let Some(path) = &args.out {
        cache::write_atomic(path, atlas_to_json(&atlas).as_bytes())?;
    }
    Ok(if any_failed {
        1
    } else if any_check_failed {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    })
}

/// All k-subsets of [0, n] that contain 0 and have element gcd 1.
fn normalized_sets(n: i64, k: usize) -> Vec<IntegerSet> {
    fn rec(from: i64, n: i64, k: usize, cur: &mut Vec<i64>, out: &mut Vec<IntegerSet>) {
        if cur.len() == k {
            let set = IntegerSet::new(cur.clone()).unwrap();
            if set.is_normalized() {
                out.push(set);
            }
            return;
        }
        for a in from..=n - (k - cur.len() - 1) as i64 {
            cur.push(a);
            rec(a + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut vec![0], &mut out);
    out
}

fn run_verify() -> anyhow::Result<i32> {
    let mut failures = 0;
    let mut check = |name: &str, outcome: anyhow::Result<String>| match outcome {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(e) => {
            failures += 1;
            println!("FAIL {name}: {e:#}");
        }
    };

    check("kernel-pins", (|| {
        for (set, h, want_size, want_intervals) in [
            (vec![0, 1, 2], 3u32, 7u64, vec![(0i64, 6i64)]),
            (vec![0, 1, 3], 3, 9, vec![(0, 7), (9, 9)]),
            (vec![0, 1, 4], 3, 10, vec![(0, 6), (8, 9), (12, 12)]),
        ] {
            let v = hfold_sumset(&IntegerSet::new(set.clone())?, h)?;
            let ivs: Vec<(i64, i64)> = v.intervals().iter().map(|iv| (iv.lo, iv.hi)).collect();
            if v.cardinality() != want_size || ivs != want_intervals {
                bail!("h{set:?} gave size {} intervals {ivs:?}", v.cardinality());
            }
        }
        Ok("3-fold sumsets of {0,1,2}, {0,1,3}, {0,1,4}".into())
    })());

    check("oracle-equivalence", (|| {
        let mut checked = 0u64;
        for k in 1..=4 {
            for a in normalized_sets(12, k) {
                for h in 0..=4 {
                    let fast = hfold_sumset(&a, h)?;
                    let slow = sumset_by_definition(&a, h)?;
                    if !fast.iter().eq(slow.iter()) {
                        bail!("kernel and oracle disagree on {a} at h = {h}");
                    }
                    checked += 1;
                }
            }
        }
        Ok(format!("{checked} kernel/oracle comparisons"))
    })());

    check("composition-interval", (|| {
        for h in 1..=8 {
            for k in 1..=6 {
                let got = weighted_part_sums(h, k)?;
                let want = IntegerSet::new((0..=(k as i64 - 1) * h as i64).collect())?;
                if got != want {
                    bail!("weighted part sums at h={h} k={k} gave {got}");
                }
            }
        }
        Ok("weighted part sums fill [0, (k-1)h] for h <= 8, k <= 6".into())
    })());

    check("progression-formula", (|| {
        let mut checked = 0u64;
        for a in 1..=3u64 {
            for ell in 1..=3u64 {
                for b in a..=(a - 1) * 4 + 3 {
                    let spec = ProgressionOfIntervalsSpec::new(a, ell, b)?;
                    let set = spec.build()?;
                    for h in 0..=4 {
                        if spec.predicted_size(h)? != hfold_sumset(&set, h)?.cardinality() {
                            bail!("progression a={a} l={ell} b={b} h={h} mispredicted");
                        }
                        checked += 1;
                    }
                }
            }
        }
        Ok(format!("{checked} predicted sizes match the kernel"))
    })());

    check("two-interval-formula", (|| {
        let mut checked = 0u64;
        for a in 1..=3u64 {
            for c in 0..a {
                for h in 2..=4u32 {
                    for b in a + 1..=(h as u64 * a + 2).max(a + 2) {
                        let spec = TwoIntervalSpec::new(a, b, c)?;
                        let set = spec.build()?;
                        if spec.predicted_size(h)? != hfold_sumset(&set, h)?.cardinality() {
                            bail!("two-interval a={a} b={b} c={c} h={h} mispredicted");
                        }
                        checked += 1;
                    }
                }
            }
        }
        Ok(format!("{checked} predicted sizes match the kernel"))
    })());

    let mut complete_results = Vec::new();
    check("closed-vs-search", (|| {
        for (h, k) in [(3u32, 3u64), (4, 3), (2, 5)] {
            let n = completeness_bound(h, k)? as i64;
            let searched = sumrange::range::search_range(&SearchConfig::new(h, k, n))?;
            let closed = closed_form_range(h, k)?
                .ok_or_else(|| anyhow!("({h}, {k}) should have a closed form"))?;
            if searched.sizes() != closed.sizes() || searched.witnesses() != closed.witnesses() {
                bail!("search and closed form disagree at ({h}, {k})");
            }
            complete_results.push(searched);
        }
        Ok("search reproduces the closed forms at (3,3), (4,3), (2,5)".into())
    })());

    check("structure-checks", (|| {
        if complete_results.is_empty() {
            bail!("skipped: closed-vs-search failed");
        }
        for r in &complete_results {
            let report = verify_structure(r);
            if !report.all_passed() {
                bail!("structure checks failed for ({}, {})", r.h(), r.k());
            }
        }
        Ok(format!("{} complete results pass all checks", complete_results.len()))
    })());

    check("construction-members", (|| {
        for h in 2..=6u32 {
            let members = construction_members(h, 4)?;
            let sizes: Vec<u64> = members.iter().map(|m| m.size).collect();
            let square = (h as u64 + 1) * (h as u64 + 1);
            if !sizes.contains(&square) {
                bail!("members at ({h}, 4) miss (h+1)^2 = {square}");
            }
            if !sizes.contains(&(h as u64 * 4)) {
                bail!("members at ({h}, 4) miss hk = {}", h * 4);
            }
        }
        Ok("family schedules cover (h+1)^2 and hk at k = 4 for h in [2, 6]".into())
    })());

    if failures == 0 {
        println!("all checks passed");
        Ok(EXIT_OK)
    } else {
        println!("{failures} check(s) failed");
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_specs_parse() {
        assert_eq!(parse_range_spec("2").unwrap(), (2, 2));
        assert_eq!(parse_range_spec("1..3").unwrap(), (1, 3));
        assert_eq!(parse_range_spec("1-3").unwrap(), (1, 3));
        assert!(parse_range_spec("x").is_err());
    }

    #[test]
    fn param_lists_are_validated() {
        let p = parse_params(
            &["a=2".into(), "l=2".into(), "b=3".into(), "h=2".into()],
            &["a", "l", "b", "h"],
        )
        .unwrap();
        assert_eq!(p["a"], 2);
        assert!(parse_params(&["a=2".into()], &["a", "b"]).is_err()); // missing b
        assert!(parse_params(&["q=2".into()], &["a"]).is_err()); // unknown
        assert!(parse_params(&["a=2".into(), "a=3".into()], &["a"]).is_err()); // dup
        assert!(parse_params(&["a=-1".into()], &["a"]).is_err()); // negative
    }

    #[test]
    fn shard_estimates_grow_with_bound() {
        assert!(shard_estimate(4, 6911) < MAX_SHARDS);
        assert!(shard_estimate(4, 1 << 20) > MAX_SHARDS);
        assert_eq!(shard_estimate(2, 1 << 30), 1);
    }

    #[test]
    fn cli_parses_documented_invocations() {
        use clap::Parser;
        for argv in [
            vec!["sumrange", "sumset", "{0,1,3}", "3"],
            vec!["sumrange", "sumset", "0,1,4", "3", "--oracle"],
            vec!["sumrange", "construct", "two-interval", "a=2", "b=4", "c=0", "h=3"],
            vec!["sumrange", "range", "3", "3", "--complete"],
            vec!["sumrange", "range", "3", "4", "--bound", "64"],
            vec!["sumrange", "range", "3", "4", "--bound", "64", "--sample", "100", "--seed", "7"],
            vec!["sumrange", "atlas", "--h", "1..3", "--k", "1..3", "--complete"],
            vec!["sumrange", "verify"],
        ] {
            Cli::try_parse_from(&argv).unwrap_or_else(|e| panic!("{argv:?}: {e}"));
        }
        // Conflicting and incomplete flag sets are rejected at parse time.
        assert!(Cli::try_parse_from(["sumrange", "range", "3", "3", "--complete", "--bound", "9"])
            .is_err());
        assert!(Cli::try_parse_from(["sumrange", "range", "3", "3", "--sample", "5"]).is_err());
        assert!(Cli::try_parse_from(["sumrange", "range", "3", "3", "--seed", "5"]).is_err());
    }
}
