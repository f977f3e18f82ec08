//! `textidx`: build, query, verify and benchmark the text indexes.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use textidx::harness::{
    self, load_corpus, load_dictionary, load_queries, BenchConfig, FmBench, SplitBench,
};
use textidx::registry::{BuildParams, IndexRegistry, QueryOp, TextIndex};
use textidx::text::{entropy, FrequencyTable};

#[derive(Parser)]
#[command(name = "textidx", version, about = "Full-text and dictionary indexes workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index and write it to a file
    Build(BuildArgs),
    /// Answer queries against a saved index, one output line per query
    Query(QueryArgs),
    /// Replay queries against the index and a brute-force oracle
    Verify(VerifyArgs),
    /// Symbol frequencies and zero-order entropy of a file
    Stats(StatsArgs),
    /// Run benchmarks and print a CSV report
    #[command(long_about = BENCH_HELP)]
    Bench(BenchArgs),
}

const BENCH_HELP: &str = "Run benchmarks and print a CSV report.

Columns: structure, params, pattern_len, index_bytes, build_ms, queries,
repeats, mean_ns, p50_ns, p95_ns, per_char_ns, verifications,
length_rejections, mean_lf_steps, load_factor, max_chain.

Times are nanoseconds per query, measured over the whole batch after one
warm-up pass and repeated --repeats times. They include everything from the
pattern bytes to the answer. per_char_ns is p50_ns / pattern_len. Rows
without queries carry build fields only.";

#[derive(Args)]
struct BuildArgs {
    /// split | fm-super | fm-linear
    #[arg(long = "type")]
    kind: String,
    /// Dictionary (split) or corpus (FM kinds)
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Allowed mismatches (split)
    #[arg(long)]
    k: Option<usize>,
    /// Longest power-of-two gram (fm-super)
    #[arg(long)]
    qmax: Option<usize>,
    /// Minimizer window in q-grams (fm-linear)
    #[arg(long)]
    alpha: Option<usize>,
    /// Minimizer gram length (fm-linear)
    #[arg(long)]
    q: Option<usize>,
    /// Substitution-code the stored pieces (split)
    #[arg(long)]
    compress: bool,
    #[arg(long)]
    max_load_factor: Option<f64>,
    /// String hash for the bucket map
    #[arg(long)]
    hash: Option<String>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, conflicts_with = "queries", required_unless_present = "queries")]
    pattern: Option<String>,
    /// One pattern per line; `wrong->right` lines use the left side
    #[arg(long)]
    queries: Option<PathBuf>,
    /// match | count | words (default depends on the index type)
    #[arg(long)]
    op: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    queries: Option<PathBuf>,
    /// Number of seeded random queries
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Original input for the oracle; defaults to the data recovered from the index
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Dictionary for split-index rows
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Corpus for FM rows
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    ks: Vec<usize>,
    #[arg(long)]
    compress: bool,
    /// Split queries, or FM queries per pattern length
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long, value_delimiter = ',', default_value = "16,31,32,64,127,128")]
    lengths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "128")]
    qmax: Vec<usize>,
    /// fm-linear configurations as alpha:q
    #[arg(long, value_delimiter = ',', default_value = "8:4")]
    linear: Vec<String>,
    #[arg(long, default_value_t = 100)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = textidx::hashing::DEFAULT_HASH)]
    hash: String,
    #[arg(long)]
    max_load_factor: Option<f64>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<textidx::Error> for Failure {
    fn from(e: textidx::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Query(a) => query(a),
        Command::Verify(a) => verify(a),
        Command::Stats(a) => stats(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn build(a: BuildArgs) -> Outcome {
    let registry = IndexRegistry::default();
    let kind = registry.get(&a.kind).map_err(|e| Failure::Usage(e.to_string()))?;
    let params = BuildParams {
        k: a.k,
        q_max: a.qmax,
        alpha: a.alpha,
        q: a.q,
        compress: a.compress,
        max_load_factor: a.max_load_factor,
        hash: a.hash,
    };
    for flag in params.specific_flags() {
        if !kind.flags().contains(&flag) {
            return Err(Failure::Usage(format!("--{flag} does not apply to --type {}", kind.name())));
        }
    }
    if params.k == Some(0) {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    if let Some(h) = &params.hash {
        textidx::hashing::by_name(h).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(lf) = params.max_load_factor {
        if !(lf.is_finite() && lf > 0.0) {
            return Err(Failure::Usage("--max-load-factor must be positive".into()));
        }
    }
    let source = kind.load_source(&a.input)?;
    let index = kind.build(&source, &params)?;
    std::fs::write(&a.out, index.envelope().to_bytes())
        .map_err(|e| Failure::Runtime(format!("{}: {e}", a.out.display())))?;
    let mut out = io::stdout().lock();
    for (name, value) in index.summary() {
        writeln!(out, "{name}\t{value}")?;
    }
    if kind.name() == "split" {
        let (_, ingest) = load_dictionary(&a.input)?;
        writeln!(out, "rejected_lines\t{}", ingest.bad_bytes + ingest.too_long)?;
        writeln!(out, "duplicates\t{}", ingest.duplicates)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn load_index(path: &Path) -> Result<Box<dyn TextIndex>, Failure> {
    Ok(IndexRegistry::default().load(path)?)
}

fn pick_op(index: &dyn TextIndex, op: Option<&str>) -> Result<QueryOp, Failure> {
    let op = match op {
        None => return Ok(index.default_op()),
        Some(s) => s.parse::<QueryOp>().map_err(|e| Failure::Usage(e.to_string()))?,
    };
    if !index.ops().contains(&op) {
        return Err(Failure::Usage(format!("op {op} is not supported by a {} index", index.kind())));
    }
    Ok(op)
}

fn query(a: QueryArgs) -> Outcome {
    let index = load_index(&a.index)?;
    let op = pick_op(index.as_ref(), a.op.as_deref())?;
    let patterns = match (&a.pattern, &a.queries) {
        (Some(p), _) => vec![p.as_bytes().to_vec()],
        (None, Some(path)) => load_queries(path)?.queries,
        (None, None) => unreachable!("clap requires one"),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let mut failed = false;
    for p in &patterns {
        match index.answer(p, op) {
            Ok(answer) => writeln!(out, "{}", answer.render())?,
            Err(e) => {
                failed = true;
                writeln!(out, "error: {e}")?;
            }
        }
    }
    out.flush()?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn verify(a: VerifyArgs) -> Outcome {
    let registry = IndexRegistry::default();
    let index = load_index(&a.index)?;
    let source = match &a.input {
        Some(path) => registry.get(index.kind())?.load_source(path)?,
        None => index.source()?,
    };
    let patterns = match (&a.queries, a.random) {
        (Some(path), _) => load_queries(path)?.queries,
        (None, Some(n)) => index.random_queries(&source, n, a.seed)?,
        (None, None) => unreachable!("clap requires one"),
    };
    let op = index.default_op();
    let (mut discrepancies, mut skipped) = (0usize, 0usize);
    for p in &patterns {
        match index.answer(p, op) {
            Ok(answer) => discrepancies += usize::from(answer != index.oracle(&source, p, op)),
            Err(_) => skipped += 1,
        }
    }
    println!("queries\t{}", patterns.len());
    println!("skipped\t{skipped}");
    println!("{discrepancies} discrepancies");
    Ok(if discrepancies == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn render_symbol(b: u8) -> String {
    if (0x21..=0x7E).contains(&b) {
        (b as char).to_string()
    } else {
        format!("0x{b:02X}")
    }
}

fn stats(a: StatsArgs) -> Outcome {
    let bytes = std::fs::read(&a.input).map_err(|e| Failure::Runtime(format!("{}: {e}", a.input.display())))?;
    let freq = FrequencyTable::from_bytes(&bytes);
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "symbol\tcount\tprobability")?;
    for s in freq.by_frequency() {
        writeln!(out, "{}\t{}\t{:.6}", render_symbol(s), freq.count(s), freq.probability(s))?;
    }
    writeln!(out, "total\t{}", freq.total())?;
    match entropy(&freq) {
        Ok(e) => writeln!(out, "entropy\t{e:.6}")?,
        Err(_) => writeln!(out, "entropy\tundefined")?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn bench(a: BenchArgs) -> Outcome {
    if a.dictionary.is_none() && a.corpus.is_none() {
        return Err(Failure::Usage("bench needs --dictionary and/or --corpus".into()));
    }
    let mut linear = Vec::new();
    for spec in &a.linear {
        let parsed = spec
            .split_once(':')
            .and_then(|(x, y)| Some((x.parse().ok()?, y.parse().ok()?)));
        match parsed {
            Some(pair) => linear.push(pair),
            None => return Err(Failure::Usage(format!("--linear expects alpha:q, got {spec:?}"))),
        }
    }
    if a.ks.contains(&0) {
        return Err(Failure::Usage("--ks values must be at least 1".into()));
    }
    let split = match &a.dictionary {
        Some(path) => Some(SplitBench {
            words: load_dictionary(path)?.0.words().to_vec(),
            ks: a.ks.clone(),
            compress: a.compress,
            queries: a.queries,
        }),
        None => None,
    };
    let fm = match &a.corpus {
        Some(path) => Some(FmBench {
            corpus: load_corpus(path)?,
            q_maxes: a.qmax.clone(),
            linear,
            lengths: a.lengths.clone(),
            queries_per_length: a.queries,
        }),
        None => None,
    };
    let config = BenchConfig {
        repeats: a.repeats,
        seed: a.seed,
        hash: a.hash,
        max_load_factor: a.max_load_factor,
        split,
        fm,
        ..BenchConfig::default()
    };
    let report = harness::run_bench(&config)?;
    print!("{}", report.to_csv());
    Ok(ExitCode::SUCCESS)
}
