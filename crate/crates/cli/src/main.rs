use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcdist::bound::{calibrate_chunk_size, run_chunked, BoundResult, Form, Progress, SearchOptions, WeightKernel};
use qcdist::combinatorics::{rank, unrank};
use qcdist::construct::{refined_bound, CramerKernel, Witness};
use qcdist::permanent::{benchmark, write_bench_csv, Engine};
use qcdist::qc::{parse_qcmat_table, render_qcmat, CodeInfo, PolyMatrix, ScaleMode};
use qcdist::ring::PolyResidue;
use qcdist::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_OVERFLOW: u8 = 4;
const EXIT_CHECKPOINT: u8 = 5;

/// Minimum-distance upper bounds for quasi-cyclic LDPC codes.
#[derive(Parser)]
#[command(name = "qcdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weight-matrix bound over all (J+1)-column subsets.
    Bound(SearchArgs),
    /// Bound from explicitly constructed codewords of H(x).
    Refine {
        #[command(flatten)]
        search: SearchArgs,
        /// Write the minimum-weight codeword here as JSON.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Verify a JSON codeword against a matrix (exit 1 if it is not one).
    Check {
        matrix: PathBuf,
        codeword: PathBuf,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Print the expanded binary parity-check matrix in alist format.
    Expand {
        matrix: PathBuf,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Time permanent engines on random sparse {0,1} matrices; CSV on stdout.
    Bench {
        #[arg(long, default_value_t = 3)]
        weight: usize,
        /// Comma-separated matrix orders.
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12,14,16")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated engine names.
        #[arg(long, value_delimiter = ',', default_value = "recursive,ryser,ryser-gray,nijenhuis-wilf")]
        engines: Vec<Engine>,
    },
    /// Lexicographic rank of a subset of [L].
    Rank {
        #[arg(long)]
        universe: usize,
        #[arg(value_delimiter = ',', num_args = 0..)]
        members: Vec<usize>,
    },
    /// Subset of [L] with the given lexicographic rank.
    Unrank {
        #[arg(long)]
        universe: usize,
        #[arg(long)]
        k: usize,
        rank: u64,
    },
    /// Suggest a chunk size from a timed sample of subsets.
    Calibrate {
        matrix: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Kernel::Weight)]
        kernel: Kernel,
        #[arg(long, default_value = "sum")]
        form: Form,
        #[arg(long, default_value_t = 256)]
        sample: u64,
        /// Desired seconds per chunk.
        #[arg(long, default_value_t = 0.5)]
        target: f64,
    },
    /// Emit a random qcmat with entries of weight at most --max-weight.
    Random {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1)]
        max_weight: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Weight,
    Cramer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct InputArgs {
    /// Re-derive exponents for this circulant size.
    #[arg(long)]
    scale_to: Option<usize>,
    /// Defaults to the file's `#scale-mode` metadata.
    #[arg(long)]
    scale_mode: Option<ScaleMode>,
}

#[derive(Args)]
struct SearchArgs {
    matrix: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "sum")]
    form: Form,
    /// Punctured block columns, comma-separated, or `none`. Defaults to the
    /// file's `#punctured` metadata.
    #[arg(long)]
    punctured: Option<String>,
    #[arg(long, default_value_t = 4096)]
    chunk_size: u64,
    /// Defaults to the available hardware parallelism.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// Evaluate only the first this-many subset ranks.
    #[arg(long)]
    budget: Option<u64>,
    /// Stop once the running minimum is at or below this value.
    #[arg(long)]
    stop_at: Option<u128>,
    /// Stop after roughly this many subsets in this invocation, keeping the
    /// checkpoint for a later --resume.
    #[arg(long)]
    halt_after: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Accepted for uniformity; the search itself uses no randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress lines on stderr.
    #[arg(long, short)]
    quiet: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::Overflow { .. } => EXIT_OVERFLOW,
            Error::Checkpoint { .. } | Error::CheckpointMismatch { .. } => EXIT_CHECKPOINT,
            Error::InvalidArgument(_) | Error::Unsupported(_) | Error::OrderTooLarge { .. } => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_FAIL, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qcdist: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Bound(args) => cmd_bound(&args),
        Command::Refine { search, witness } => cmd_refine(&search, witness.as_deref()),
        Command::Check { matrix, codeword, input } => cmd_check(&matrix, &codeword, &input),
        Command::Expand { matrix, input } => {
            let (h, _) = load(&matrix, &input)?;
            print!("{}", h.expand().to_alist());
            Ok(0)
        }
        Command::Bench { weight, orders, trials, seed, engines } => {
            if orders.is_empty() || engines.is_empty() || trials == 0 {
                return Err(usage("bench needs at least one order, engine and trial"));
            }
            if let Some(e) = engines.iter().find(|e| !Engine::IMPLEMENTED.contains(e)) {
                return Err(usage(format!("engine {e} is not implemented")));
            }
            let records = benchmark(&engines, &orders, weight, trials, seed)?;
            write_bench_csv(io::stdout().lock(), &records)?;
            Ok(0)
        }
        Command::Rank { universe, members } => {
            println!("{}", rank(&members, universe)?);
            Ok(0)
        }
        Command::Unrank { universe, k, rank } => {
            let s = unrank(rank, universe, k)?;
            println!("{}", join(&s));
            Ok(0)
        }
        Command::Calibrate { matrix, input, kernel, form, sample, target } => {
            if !(target > 0.0 && target.is_finite()) {
                return Err(usage("--target must be a positive number of seconds"));
            }
            let (h, info) = load(&matrix, &input)?;
            let target = Duration::from_secs_f64(target);
            let (size, spent) = match kernel {
                Kernel::Weight => {
                    let a = h.weight_matrix();
                    calibrate_chunk_size(&WeightKernel::new(&a, &info.punctured, form)?, sample, target)?
                }
                Kernel::Cramer => calibrate_chunk_size(&CramerKernel::new(&h)?, sample, target)?,
            };
            println!("chunk_size {size}");
            eprintln!("sample of {sample} took {:.3}s", spent.as_secs_f64());
            Ok(0)
        }
        Command::Random { rows, cols, order, max_weight, seed } => {
            print!("{}", random_qcmat(rows, cols, order, max_weight, seed)?);
            Ok(0)
        }
    }
}

fn load(path: &Path, input: &InputArgs) -> Result<(PolyMatrix, CodeInfo), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_FAIL,
        message: format!("{}: {e}", path.display()),
    })?;
    let (table, info) = parse_qcmat_table(&text).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", path.display()),
    })?;
    let table = match input.scale_to {
        None => {
            if input.scale_mode.is_some() {
                return Err(usage("--scale-mode needs --scale-to"));
            }
            table
        }
        Some(target) => {
            let mode = match (input.scale_mode, info.extra.get("scale-mode")) {
                (Some(m), _) => m,
                (None, Some(m)) => m.parse().map_err(|e: String| usage(format!("{}: {e}", path.display())))?,
                (None, None) => return Err(usage("--scale-to needs --scale-mode or `#scale-mode` metadata")),
            };
            table.scale(target, mode)?
        }
    };
    Ok((table.to_poly_matrix(), info))
}

fn punctured_set(arg: Option<&str>, info: &CodeInfo, cols: usize) -> Result<BTreeSet<usize>, Failure> {
    let set = match arg {
        None => info.punctured.clone(),
        Some("none") | Some("") => BTreeSet::new(),
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("bad punctured column {s:?}"))))
            .collect::<Result<_, _>>()?,
    };
    if let Some(&bad) = set.iter().find(|&&c| c >= cols) {
        return Err(usage(format!("punctured column {bad} is not below L={cols}")));
    }
    Ok(set)
}

fn options<'a>(args: &SearchArgs, progress: &'a (dyn Fn(&Progress) + Sync)) -> Result<SearchOptions<'a>, Failure> {
    let workers = match args.workers {
        Some(0) => return Err(usage("--workers must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if args.chunk_size == 0 {
        return Err(usage("--chunk-size must be at least 1"));
    }
    if let Some(path) = &args.checkpoint {
        if args.resume && !path.exists() {
            return Err(usage(format!("no checkpoint at {} to resume", path.display())));
        }
        if !args.resume && path.exists() {
            return Err(usage(format!("{} exists; pass --resume or remove it", path.display())));
        }
    }
    Ok(SearchOptions {
        chunk_size: args.chunk_size,
        workers,
        chunks_per_round: None,
        checkpoint: args.checkpoint.clone(),
        resume: args.resume,
        budget: args.budget,
        stop_at: args.stop_at,
        halt_after: args.halt_after,
        progress: (!args.quiet).then_some(progress),
    })
}

fn report_progress(p: &Progress) {
    let best = p.best.map_or_else(|| "-".to_string(), |b| b.to_string());
    eprintln!(
        "[{:>8.1}s] {}/{} subsets, best {best}",
        p.elapsed.as_secs_f64(),
        p.frontier,
        p.domain_end
    );
}

fn cmd_bound(args: &SearchArgs) -> Result<u8, Failure> {
    let (h, info) = load(&args.matrix, &args.input)?;
    let punctured = punctured_set(args.punctured.as_deref(), &info, h.cols())?;
    let opts = options(args, &report_progress)?;
    let a = h.weight_matrix();
    let kernel = WeightKernel::new(&a, &punctured, args.form)?;
    let start = Instant::now();
    let result = run_chunked(&kernel, &opts).map_err(annotate)?;
    emit(args.format, &args.matrix, "weight-matrix", &result, start.elapsed(), None)?;
    Ok(0)
}

fn cmd_refine(args: &SearchArgs, witness_path: Option<&Path>) -> Result<u8, Failure> {
    if args.form != Form::Sum || args.punctured.is_some() {
        return Err(usage("refine works on H(x) directly; --form and --punctured do not apply"));
    }
    let (h, _) = load(&args.matrix, &args.input)?;
    let opts = options(args, &report_progress)?;
    let start = Instant::now();
    let (result, word) = refined_bound(&h, args.budget, &opts).map_err(annotate)?;
    let witness = word.map(|w| w.to_witness());
    if let (Some(path), Some(w)) = (witness_path, &witness) {
        fs::write(path, w.to_json() + "\n")?;
    }
    emit(args.format, &args.matrix, "cramer", &result, start.elapsed(), witness.as_ref())?;
    Ok(0)
}

fn cmd_check(matrix: &Path, codeword: &Path, input: &InputArgs) -> Result<u8, Failure> {
    let (h, _) = load(matrix, input)?;
    let text = fs::read_to_string(codeword)?;
    let witness = Witness::from_json(&text).map_err(|e| Failure {
        code: if matches!(e, Error::Parse { .. }) { EXIT_PARSE } else { EXIT_USAGE },
        message: format!("{}: {e}", codeword.display()),
    })?;
    if witness.check(&h)? {
        println!("pass weight {}", witness.weight);
        Ok(0)
    } else {
        println!("fail nonzero syndrome");
        Ok(EXIT_FAIL)
    }
}

fn annotate(e: Error) -> Failure {
    let hint = matches!(e, Error::Overflow { .. });
    let mut f = Failure::from(e);
    if hint {
        f.message.push_str("; try a smaller matrix");
    }
    f
}

fn join(s: &[usize]) -> String {
    s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn emit(
    format: Format,
    path: &Path,
    kernel: &str,
    r: &BoundResult,
    wall: Duration,
    witness: Option<&Witness>,
) -> io::Result<()> {
    let mut out = io::stdout().lock();
    let bound = r.bound.map_or_else(|| "none".to_string(), |b| b.to_string());
    let subset = r.argmin_subset.as_deref().map_or_else(|| "-".to_string(), join);
    let status = match r.status {
        qcdist::bound::Status::Complete => "complete",
        qcdist::bound::Status::Partial => "partial",
    };
    match format {
        Format::Table => {
            writeln!(out, "file      {}", path.display())?;
            writeln!(out, "kernel    {kernel}")?;
            writeln!(out, "bound     {bound}")?;
            writeln!(out, "argmin    {subset}")?;
            writeln!(out, "evaluated {}/{}", r.subsets_evaluated, r.total_subsets)?;
            writeln!(out, "status    {status}")?;
            writeln!(out, "seconds   {:.3}", wall.as_secs_f64())?;
        }
        Format::Csv => {
            writeln!(out, "file,kernel,bound,argmin,argmin_rank,evaluated,total,status,seconds")?;
            writeln!(
                out,
                "{},{kernel},{bound},{},{},{},{},{status},{:.6}",
                path.display(),
                subset.replace(',', " "),
                r.argmin_rank.map_or_else(String::new, |x| x.to_string()),
                r.subsets_evaluated,
                r.total_subsets,
                wall.as_secs_f64()
            )?;
        }
        Format::Json => {
            let mut v = serde_json::to_value(r).map_err(io::Error::other)?;
            v["file"] = path.display().to_string().into();
            v["kernel"] = kernel.into();
            v["seconds"] = wall.as_secs_f64().into();
            if let Some(w) = witness {
                v["witness"] = serde_json::to_value(w).map_err(io::Error::other)?;
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(io::Error::other)?)?;
        }
    }
    Ok(())
}

fn random_qcmat(rows: usize, cols: usize, order: usize, max_weight: usize, seed: u64) -> Result<String, Failure> {
    if rows == 0 || cols == 0 || order == 0 || max_weight > order {
        return Err(usage("need positive --rows, --cols, --order and --max-weight <= --order"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    let w = rng.random_range(0..=max_weight);
                    let mut e = rand::seq::index::sample(&mut rng, order, w).into_vec();
                    e.sort_unstable();
                    PolyResidue::from_exponents(order, &e)
                })
                .collect::<qcdist::Result<Vec<_>>>()
        })
        .collect::<qcdist::Result<Vec<_>>>()?;
    let h = PolyMatrix::new(order, entries)?;
    let mut info = CodeInfo::default();
    info.extra.insert("seed".into(), seed.to_string());
    Ok(render_qcmat(&h, &info))
}
