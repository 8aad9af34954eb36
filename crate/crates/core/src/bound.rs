//! The weight-matrix bound
//!
//! ```text
//! d_min <= min*_{S subset [L], |S| = J+1}  sum_{i in S} perm(A_{S \ i})
//!        = min*_{S}  perm([A_S ; 1 ... 1])
//! ```
//!
//! and the scheduler that evaluates a per-subset kernel over every rank of
//! the lexicographic `C(L, J+1)` numbering, in parallel, with checkpointing.
//!
//! The scheduler runs rounds of contiguous chunks. Workers process the
//! chunks of a round in parallel; at the end of each round the per-chunk
//! minima are reduced (by value, then rank), the checkpoint is rewritten
//! atomically and progress is reported. The checkpoint therefore always
//! describes a fully completed rank prefix `[0, frontier)`.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::combinatorics::{binomial, unrank, SubsetCursor};
use crate::permanent::{perm_dispatch, IntMatrix, MatrixView, PermanentValue};
use crate::qc::WeightMatrix;
use crate::{Error, Result};

/// Which algebraic route evaluates a subset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// `sum_{i in S} perm(A_{S \ i})`
    Sum,
    /// `perm` of `A_S` with an appended row of ones (zeros at punctured
    /// columns).
    Augmented,
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sum" => Ok(Form::Sum),
            "augmented" => Ok(Form::Augmented),
            _ => Err(format!("unknown form {s:?}")),
        }
    }
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Sum => "sum",
            Form::Augmented => "augmented",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    Partial,
}

/// Outcome of a search.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoundResult {
    /// `None` when no evaluated subset produced a positive term.
    pub bound: Option<u128>,
    pub argmin_subset: Option<Vec<usize>>,
    pub argmin_rank: Option<u64>,
    pub subsets_evaluated: u64,
    pub total_subsets: u64,
    pub status: Status,
}

fn check_subset_len(a: &WeightMatrix, subset: &[usize]) -> Result<()> {
    if subset.len() != a.rows() + 1 {
        return Err(Error::invalid(format!(
            "subset has {} columns, expected J+1 = {}",
            subset.len(),
            a.rows() + 1
        )));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) || subset.last().is_some_and(|&c| c >= a.cols()) {
        return Err(Error::invalid(format!("{subset:?} is not an ascending subset of [{}]", a.cols())));
    }
    if a.rows() + 1 >= crate::permanent::MAX_DIM {
        return Err(Error::invalid("too many rows for a permanent view"));
    }
    Ok(())
}

fn fill_columns(a: &WeightMatrix, subset: &[usize], scratch: &mut IntMatrix) {
    for j in 0..a.rows() {
        for (c, &col) in subset.iter().enumerate() {
            scratch.set(j, c, a.get(j, col));
        }
    }
}

/// `sum_{i in S} perm(A_{S \ i})`, skipping punctured `i`.
pub fn subset_term(a: &WeightMatrix, subset: &[usize]) -> Result<PermanentValue> {
    let mut scratch = IntMatrix::zeros(a.rows(), subset.len());
    sum_form(a, subset, &BTreeSet::new(), &mut scratch)
}

/// `perm([A_S ; b])` where `b` is all ones except zero at punctured columns.
pub fn subset_term_augmented(
    a: &WeightMatrix,
    subset: &[usize],
    punctured: &BTreeSet<usize>,
) -> Result<PermanentValue> {
    let mut scratch = IntMatrix::zeros(a.rows() + 1, subset.len());
    augmented_form(a, subset, punctured, &mut scratch)
}

fn sum_form(
    a: &WeightMatrix,
    subset: &[usize],
    punctured: &BTreeSet<usize>,
    scratch: &mut IntMatrix,
) -> Result<PermanentValue> {
    check_subset_len(a, subset)?;
    fill_columns(a, subset, scratch);
    let rows = (1u64 << a.rows()) - 1;
    let all_cols = (1u64 << subset.len()) - 1;
    let mut total = PermanentValue::ZERO;
    for (c, col) in subset.iter().enumerate() {
        if punctured.contains(col) {
            continue;
        }
        let mut view = MatrixView::new(scratch, rows, all_cols & !(1 << c))?;
        total = total.checked_add(perm_dispatch(&mut view)?)?;
    }
    Ok(total)
}

fn augmented_form(
    a: &WeightMatrix,
    subset: &[usize],
    punctured: &BTreeSet<usize>,
    scratch: &mut IntMatrix,
) -> Result<PermanentValue> {
    check_subset_len(a, subset)?;
    fill_columns(a, subset, scratch);
    for (c, col) in subset.iter().enumerate() {
        scratch.set(a.rows(), c, (!punctured.contains(col)) as u32);
    }
    perm_dispatch(&mut MatrixView::full(scratch)?)
}

/// A per-subset computation the scheduler can drive.
pub trait SubsetKernel: Sync {
    type Scratch: Send;

    /// `L`
    fn universe(&self) -> usize;
    /// `J + 1`
    fn subset_size(&self) -> usize;
    fn new_scratch(&self) -> Self::Scratch;
    /// Candidate value for one subset; `None` means the subset contributes
    /// nothing (a zero term under `min*`).
    fn evaluate(&self, scratch: &mut Self::Scratch, subset: &[usize]) -> Result<Option<u128>>;
    /// Canonical description of the problem, hashed into checkpoints.
    fn fingerprint(&self) -> Fingerprint;
}

/// Identity of a search problem as recorded in a checkpoint.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Fingerprint {
    pub kernel: String,
    pub form: Option<Form>,
    pub punctured: Vec<usize>,
    /// Canonical text of the matrix the kernel reads.
    pub matrix: String,
}

impl Fingerprint {
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kernel.as_bytes());
        h.update([0]);
        h.update(self.form.map_or("", Form::name).as_bytes());
        h.update([0]);
        for p in &self.punctured {
            h.update(p.to_string().as_bytes());
            h.update(b",");
        }
        h.update([0]);
        h.update(self.matrix.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The weight-matrix bound kernel.
pub struct WeightKernel<'a> {
    matrix: &'a WeightMatrix,
    punctured: BTreeSet<usize>,
    form: Form,
}

impl<'a> WeightKernel<'a> {
    pub fn new(matrix: &'a WeightMatrix, punctured: &BTreeSet<usize>, form: Form) -> Result<Self> {
        if matrix.rows() >= matrix.cols() {
            return Err(Error::invalid(format!(
                "weight matrix is {}x{}; the bound needs J < L",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if matrix.rows() + 1 >= crate::permanent::MAX_DIM {
            return Err(Error::invalid("too many rows for a permanent view"));
        }
        if let Some(&bad) = punctured.iter().find(|&&c| c >= matrix.cols()) {
            return Err(Error::invalid(format!("punctured column {bad} is not below L={}", matrix.cols())));
        }
        Ok(WeightKernel { matrix, punctured: punctured.clone(), form })
    }
}

impl SubsetKernel for WeightKernel<'_> {
    type Scratch = IntMatrix;

    fn universe(&self) -> usize {
        self.matrix.cols()
    }

    fn subset_size(&self) -> usize {
        self.matrix.rows() + 1
    }

    fn new_scratch(&self) -> IntMatrix {
        IntMatrix::zeros(self.matrix.rows() + 1, self.matrix.rows() + 1)
    }

    fn evaluate(&self, scratch: &mut IntMatrix, subset: &[usize]) -> Result<Option<u128>> {
        let v = match self.form {
            Form::Sum => sum_form(self.matrix, subset, &self.punctured, scratch)?,
            Form::Augmented => augmented_form(self.matrix, subset, &self.punctured, scratch)?,
        };
        Ok((!v.is_zero()).then_some(v.get()))
    }

    fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            kernel: "weight-matrix".into(),
            form: Some(self.form),
            punctured: self.punctured.iter().copied().collect(),
            matrix: self.matrix.to_string(),
        }
    }
}

/// Snapshot passed to the progress callback after every round.
#[derive(Clone, Debug)]
pub struct Progress {
    pub frontier: u64,
    pub domain_end: u64,
    pub best: Option<u128>,
    pub elapsed: Duration,
}

pub type ProgressFn<'a> = &'a (dyn Fn(&Progress) + Sync);

/// Scheduler settings.
#[derive(Clone)]
pub struct SearchOptions<'a> {
    /// Subsets per chunk, the unit of work handed to a worker.
    pub chunk_size: u64,
    pub workers: usize,
    /// Chunks per round; the checkpoint is rewritten after each round.
    /// Defaults to four per worker.
    pub chunks_per_round: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// Continue from `checkpoint`, which must exist and match the problem.
    pub resume: bool,
    /// Evaluate only ranks below this; the result is partial if it is less
    /// than `C(L, J+1)`.
    pub budget: Option<u64>,
    /// Stop after the first round whose running minimum is at or below this.
    pub stop_at: Option<u128>,
    /// Stop after the round in which this many subsets have been evaluated
    /// by this invocation, leaving the checkpoint in place.
    pub halt_after: Option<u64>,
    pub progress: Option<ProgressFn<'a>>,
}

impl Default for SearchOptions<'_> {
    fn default() -> Self {
        SearchOptions {
            chunk_size: 4096,
            workers: 1,
            chunks_per_round: None,
            checkpoint: None,
            resume: false,
            budget: None,
            stop_at: None,
            halt_after: None,
            progress: None,
        }
    }
}

const CHECKPOINT_FORMAT: &str = "qcdist-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

/// On-disk search state.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub digest: String,
    pub fingerprint: Fingerprint,
    pub universe: usize,
    pub subset_size: usize,
    pub total_subsets: u64,
    pub domain_end: u64,
    /// Every rank below this has been evaluated.
    pub frontier: u64,
    pub best: Option<u128>,
    pub argmin_rank: Option<u64>,
    pub subsets_evaluated: u64,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let bad = |message: String| Error::Checkpoint { path: path.to_path_buf(), message };
        let text = fs::read_to_string(path).map_err(|e| bad(format!("cannot read: {e}")))?;
        let ck: Checkpoint = serde_json::from_str(&text).map_err(|e| bad(format!("corrupt: {e}")))?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported format {} v{}", ck.format, ck.version)));
        }
        if ck.digest != ck.fingerprint.digest() {
            return Err(bad("digest does not match the recorded problem".into()));
        }
        let consistent = ck.frontier <= ck.domain_end
            && ck.domain_end <= ck.total_subsets
            && ck.subsets_evaluated == ck.frontier
            && ck.best.is_some() == ck.argmin_rank.is_some()
            && ck.argmin_rank.is_none_or(|r| r < ck.frontier);
        if !consistent {
            return Err(bad("inconsistent counters".into()));
        }
        Ok(ck)
    }

    /// Write-then-rename so an interrupted write never clobbers the
    /// previous state.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string_pretty(self).expect("serializable").as_bytes())?;
        f.write_all(b"\n")?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

struct ChunkOutcome {
    best: Option<(u128, u64)>,
    evaluated: u64,
}

fn better(a: Option<(u128, u64)>, b: Option<(u128, u64)>) -> Option<(u128, u64)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn run_chunk<K: SubsetKernel>(kernel: &K, start: u64, end: u64) -> Result<ChunkOutcome> {
    let mut scratch = kernel.new_scratch();
    let mut cursor = SubsetCursor::at(start, kernel.universe(), kernel.subset_size())?;
    let mut best = None;
    for rank in start..end {
        debug_assert_eq!(cursor.rank(), rank);
        let value = kernel.evaluate(&mut scratch, cursor.members()).map_err(|e| match e {
            Error::Overflow { .. } => Error::Overflow { subset_rank: Some(rank) },
            e => e,
        })?;
        best = better(best, value.map(|v| (v, rank)));
        cursor.advance();
    }
    Ok(ChunkOutcome { best, evaluated: end - start })
}

/// Evaluates `kernel` on every subset rank in `[0, budget)` and returns the
/// smallest value with its lowest-rank argmin. The result does not depend on
/// chunk size, worker count or how often the run was interrupted and resumed.
pub fn run_chunked<K: SubsetKernel>(kernel: &K, options: &SearchOptions<'_>) -> Result<BoundResult> {
    let started = Instant::now();
    if options.chunk_size == 0 {
        return Err(Error::invalid("chunk size must be at least 1"));
    }
    if options.workers == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    let (universe, k) = (kernel.universe(), kernel.subset_size());
    let total = binomial(universe, k)
        .ok_or_else(|| Error::invalid(format!("C({universe}, {k}) exceeds 64 bits")))?;
    let domain_end = match options.budget {
        Some(b) if b > total => {
            return Err(Error::invalid(format!("budget {b} exceeds C({universe}, {k}) = {total}")))
        }
        Some(b) => b,
        None => total,
    };
    let fingerprint = kernel.fingerprint();
    let digest = fingerprint.digest();

    let mut state = Checkpoint {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        digest: digest.clone(),
        fingerprint,
        universe,
        subset_size: k,
        total_subsets: total,
        domain_end,
        frontier: 0,
        best: None,
        argmin_rank: None,
        subsets_evaluated: 0,
    };
    if options.resume {
        let path = options
            .checkpoint
            .as_deref()
            .ok_or_else(|| Error::invalid("resume requested without a checkpoint path"))?;
        let saved = Checkpoint::load(path)?;
        let mismatch = |message: String| Error::CheckpointMismatch { path: path.to_path_buf(), message };
        if saved.digest != digest {
            return Err(mismatch(format!("digest {} vs {}", saved.digest, digest)));
        }
        if (saved.universe, saved.subset_size, saved.domain_end) != (universe, k, domain_end) {
            return Err(mismatch(format!(
                "search domain [0, {}) of C({}, {}) vs [0, {domain_end}) of C({universe}, {k})",
                saved.domain_end, saved.universe, saved.subset_size
            )));
        }
        state = saved;
    }

    let workers = options.workers;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let chunks_per_round = options.chunks_per_round.unwrap_or(4 * workers).max(1) as u64;
    let round_len = options.chunk_size.saturating_mul(chunks_per_round);
    let mut evaluated_here = 0u64;

    let mut stopped_early = false;
    while state.frontier < domain_end {
        if options.stop_at.is_some_and(|floor| state.best.is_some_and(|b| b <= floor))
            || options.halt_after.is_some_and(|h| evaluated_here >= h)
        {
            stopped_early = true;
            break;
        }
        let round_end = state.frontier.saturating_add(round_len).min(domain_end);
        let chunks: Vec<(u64, u64)> = (state.frontier..round_end)
            .step_by(options.chunk_size as usize)
            .map(|s| (s, (s + options.chunk_size).min(round_end)))
            .collect();
        let outcomes: Vec<Result<ChunkOutcome>> =
            pool.install(|| chunks.par_iter().map(|&(s, e)| run_chunk(kernel, s, e)).collect());
        let mut best = state.best.zip(state.argmin_rank);
        for outcome in outcomes {
            let outcome = outcome?;
            best = better(best, outcome.best);
            state.subsets_evaluated += outcome.evaluated;
            evaluated_here += outcome.evaluated;
        }
        state.best = best.map(|b| b.0);
        state.argmin_rank = best.map(|b| b.1);
        state.frontier = round_end;
        if let Some(path) = &options.checkpoint {
            state.store(path)?;
        }
        if let Some(report) = options.progress {
            report(&Progress {
                frontier: state.frontier,
                domain_end,
                best: state.best,
                elapsed: started.elapsed(),
            });
        }
    }
    if !stopped_early {
        if let Some(path) = &options.checkpoint {
            if !path.exists() {
                state.store(path)?;
            }
        }
    }

    let argmin_subset = state.argmin_rank.map(|r| unrank(r, universe, k)).transpose()?;
    Ok(BoundResult {
        bound: state.best,
        argmin_subset,
        argmin_rank: state.argmin_rank,
        subsets_evaluated: state.subsets_evaluated,
        total_subsets: total,
        status: if state.subsets_evaluated == total { Status::Complete } else { Status::Partial },
    })
}

/// The weight-matrix bound, evaluated serially.
pub fn bound_eq1(a: &WeightMatrix, punctured: &BTreeSet<usize>, form: Form) -> Result<BoundResult> {
    run_chunked(&WeightKernel::new(a, punctured, form)?, &SearchOptions::default())
}

/// Times one chunk of `sample` subsets starting at rank 0 and suggests the
/// chunk size whose single-worker duration is closest to `target`.
pub fn calibrate_chunk_size<K: SubsetKernel>(kernel: &K, sample: u64, target: Duration) -> Result<(u64, Duration)> {
    let total = binomial(kernel.universe(), kernel.subset_size())
        .ok_or_else(|| Error::invalid("subset count exceeds 64 bits"))?;
    let sample = sample.clamp(1, total.max(1));
    let start = Instant::now();
    run_chunk(kernel, 0, sample)?;
    let spent = start.elapsed();
    let per_subset = spent.as_secs_f64() / sample as f64;
    let suggestion = if per_subset > 0.0 {
        (target.as_secs_f64() / per_subset).round().clamp(1.0, total as f64) as u64
    } else {
        total
    };
    Ok((suggestion, spent))
}
