//! Command-line surface: corpus generation, analysis, profiling, compression
//! and simulation, glued together by `RunConfig` (CLI flag > config file >
//! default) and the file formats in `store`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{exponent_histogram, rmse, topk_coverage, value_range};
use crate::chunk::{KvChunk, Scheme};
use crate::codec::{compress, decompress};
use crate::config::RunConfig;
use crate::hotness::{partition_by_hotness, AccessProfile};
use crate::sim::{
    gen_corpus, gen_workload, profile_from_workload, run_arm, AblationMode, ChunkCost, SimInputs,
    SimReport,
};
use crate::store::report::{write_analysis_csv, write_report_csv, write_summary_csv, AnalysisRow};
use crate::store::{read_corpus, read_profile_csv, read_store, write_corpus, write_profile_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn usage(e: impl ToString) -> Self {
        CliError::Usage(e.to_string())
    }

    fn runtime(e: impl ToString) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "hotkv",
    version,
    about = "Hotness-aware mixed-precision KV-chunk compression and tiered-placement simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic BF16 corpus file
    GenCorpus(GenCorpusArgs),
    /// Per-chunk value ranges, exponent coverage and per-scheme RMSE
    Analyze(AnalyzeArgs),
    /// Generate an access profile from a synthetic workload
    Profile(ProfileArgs),
    /// Compress a corpus into a chunk store using a hotness profile
    Compress(CompressArgs),
    /// Replay a workload through the tiered cost simulator
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Flat key=value config file; flags override its entries
    #[arg(long, global = false)]
    config: Option<PathBuf>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_file(&text).map_err(CliError::usage)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct GenCorpusArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of documents (two chunks each)
    #[arg(long)]
    docs: Option<u32>,
    /// Tokens per chunk
    #[arg(long)]
    tokens: Option<u32>,
    /// BF16 values per token
    #[arg(long)]
    width: Option<u32>,
    /// Output corpus path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Corpus file to analyze
    corpus: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Corpus whose ids the workload draws from; defaults to the config's
    /// synthetic corpus shape
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Number of queries
    #[arg(long)]
    queries: Option<usize>,
    /// Distinct chunks per query
    #[arg(long)]
    k: Option<usize>,
    /// Zipf skew exponent; 0 samples uniformly
    #[arg(long)]
    zipf_s: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Corpus file to compress
    corpus: PathBuf,
    /// Access-profile CSV covering every corpus chunk id
    #[arg(long)]
    profile: PathBuf,
    /// Output chunk-store path
    #[arg(long)]
    out: PathBuf,
    /// Hottest-group fraction (INT8)
    #[arg(long)]
    tau1: Option<f64>,
    /// Second-group fraction (FP8 E4M3)
    #[arg(long)]
    tau2: Option<f64>,
    /// Third-group fraction (FP8 E5M2)
    #[arg(long)]
    tau3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    MpOnly,
    DpNoPin,
    DpPinOnly,
    DpOnly,
}

impl From<ModeArg> for AblationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => AblationMode::Full,
            ModeArg::MpOnly => AblationMode::MpOnly,
            ModeArg::DpNoPin => AblationMode::DpNoPin,
            ModeArg::DpPinOnly => AblationMode::DpPinOnly,
            ModeArg::DpOnly => AblationMode::DpOnly,
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chunk store to simulate against
    store: PathBuf,
    /// Optional profile CSV fixing the hotness order; defaults to the order
    /// induced by the generated workload itself
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    queries: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    zipf_s: Option<f64>,
    /// Placement fraction for GPU memory
    #[arg(long)]
    tau_gpu: Option<f64>,
    /// Placement fraction for pinned memory
    #[arg(long)]
    tau_pin: Option<f64>,
    /// Placement fraction for pageable memory
    #[arg(long)]
    tau_page: Option<f64>,
    /// Which optimizations to keep active
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Price the baseline path only; every speedup is 1
    #[arg(long)]
    baseline_only: bool,
    /// Per-query report CSV path
    #[arg(long)]
    out: PathBuf,
    /// Summary CSV path; defaults to `<out>.summary.csv`
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses 0 for --help/--version and 2 for usage errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::GenCorpus(args) => cmd_gen_corpus(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Compress(args) => cmd_compress(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn create_out(path: &Path) -> CliResult<BufWriter<fs::File>> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn read_corpus_file(path: &Path) -> CliResult<Vec<KvChunk>> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    read_corpus(&bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn cmd_gen_corpus(args: GenCorpusArgs) -> CliResult {
    let mut cfg = args.common.load()?;
    if let Some(docs) = args.docs {
        cfg.docs = docs;
    }
    if let Some(tokens) = args.tokens {
        cfg.tokens = tokens;
    }
    if let Some(width) = args.width {
        cfg.width = width;
    }
    cfg.validate().map_err(CliError::usage)?;
    if cfg.docs == 0 || cfg.tokens == 0 || cfg.width == 0 {
        return Err(CliError::Usage("docs, tokens and width must all be at least 1".into()));
    }
    let chunks = gen_corpus(cfg.docs, cfg.tokens, cfg.width, cfg.seed);
    let mut out = create_out(&args.out)?;
    write_corpus(&mut out, &chunks).map_err(CliError::runtime)?;
    out.flush().map_err(CliError::runtime)?;
    let total: u64 = chunks.iter().map(|c| c.raw_bytes()).sum();
    println!("wrote {} chunks ({} bytes of BF16 data) to {}", chunks.len(), total, args.out.display());
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult {
    let cfg = args.common.load()?;
    cfg.validate().map_err(CliError::usage)?;
    let chunks = read_corpus_file(&args.corpus)?;
    let layout = cfg.gse_layout();
    let rows: Vec<AnalysisRow> = chunks
        .iter()
        .map(|chunk| {
            let range = value_range(chunk);
            let hist = exponent_histogram(chunk);
            let coverage = [1, 4, 8].map(|k| topk_coverage(&hist, k));
            let rmse_per_scheme = Scheme::ALL.map(|scheme| {
                let back = decompress(&compress(chunk, scheme, layout)).expect("fresh encode decodes");
                rmse(chunk, &back).expect("equal lengths")
            });
            AnalysisRow {
                chunk_id: chunk.id(),
                kind: chunk.kind().as_str(),
                min: range.min,
                max: range.max,
                coverage,
                rmse: rmse_per_scheme,
            }
        })
        .collect();
    let mut out = create_out(&args.out)?;
    write_analysis_csv(&mut out, &rows).map_err(CliError::runtime)?;
    out.flush().map_err(CliError::runtime)?;
    println!("analyzed {} chunks into {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_profile(args: ProfileArgs) -> CliResult {
    let mut cfg = args.common.load()?;
    if let Some(q) = args.queries {
        cfg.queries = q;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(s) = args.zipf_s {
        cfg.zipf_s = s;
    }
    cfg.validate().map_err(CliError::usage)?;
    let ids: Vec<u32> = match &args.corpus {
        Some(path) => read_corpus_file(path)?.iter().map(|c| c.id()).collect(),
        None => (0..cfg.docs * 2).collect(),
    };
    if cfg.k == 0 || cfg.k > ids.len() {
        return Err(CliError::Usage(format!("k must satisfy 1 <= k <= {}", ids.len())));
    }
    let workload = gen_workload(&ids, cfg.queries, cfg.k, cfg.zipf_s, cfg.seed);
    let mut profile = profile_from_workload(&workload);
    profile.cover_ids(ids);
    let mut out = create_out(&args.out)?;
    write_profile_csv(&mut out, &profile).map_err(CliError::runtime)?;
    out.flush().map_err(CliError::runtime)?;
    println!(
        "profiled {} queries x {} chunks -> {} ({} accesses)",
        cfg.queries,
        cfg.k,
        args.out.display(),
        profile.total()
    );
    Ok(())
}

fn cmd_compress(args: CompressArgs) -> CliResult {
    let mut cfg = args.common.load()?;
    if let Some(t) = args.tau1 {
        cfg.tau1 = t;
    }
    if let Some(t) = args.tau2 {
        cfg.tau2 = t;
    }
    if let Some(t) = args.tau3 {
        cfg.tau3 = t;
    }
    cfg.validate().map_err(CliError::usage)?;
    let chunks = read_corpus_file(&args.corpus)?;
    let profile_text = fs::read_to_string(&args.profile)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", args.profile.display())))?;
    let profile = read_profile_csv(&profile_text)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.profile.display())))?;
    if let Some(missing) = chunks.iter().find(|c| !profile.contains(c.id())) {
        return Err(CliError::Runtime(format!(
            "profile {} does not cover corpus chunk id {}",
            args.profile.display(),
            missing.id()
        )));
    }
    // Partition over exactly the corpus ids, with counts from the profile.
    let corpus_profile =
        AccessProfile::from_counts(chunks.iter().map(|c| (c.id(), profile.count(c.id()))));
    let partition =
        partition_by_hotness(&corpus_profile, cfg.compression_taus()).map_err(CliError::runtime)?;
    let layout = cfg.gse_layout();

    let mut out = create_out(&args.out)?;
    crate::store::write_store_header(&mut out, layout, chunks.len() as u32).map_err(CliError::runtime)?;
    let mut raw_total = 0u64;
    let mut compressed_total = 0u64;
    for chunk in &chunks {
        let scheme = partition
            .scheme_for(chunk.id())
            .expect("partition covers corpus ids by construction");
        let compressed = compress(chunk, scheme, layout);
        raw_total += compressed.raw_bytes();
        compressed_total += compressed.compressed_bytes();
        crate::store::write_store_chunk(&mut out, &compressed).map_err(CliError::runtime)?;
    }
    out.flush().map_err(CliError::runtime)?;
    let ratio = raw_total as f64 / compressed_total as f64;
    println!(
        "compressed {} chunks to {} (ratio {:.4})",
        chunks.len(),
        args.out.display(),
        ratio
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> CliResult {
    let mut cfg = args.common.load()?;
    if let Some(q) = args.queries {
        cfg.queries = q;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(s) = args.zipf_s {
        cfg.zipf_s = s;
    }
    if let Some(t) = args.tau_gpu {
        cfg.tau_gpu = t;
    }
    if let Some(t) = args.tau_pin {
        cfg.tau_pin = t;
    }
    if let Some(t) = args.tau_page {
        cfg.tau_page = t;
    }
    cfg.validate().map_err(CliError::usage)?;
    let bytes = fs::read(&args.store)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", args.store.display())))?;
    let store = read_store(&bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", args.store.display())))?;
    let ids: Vec<u32> = store.chunks.iter().map(|c| c.id).collect();
    if cfg.k == 0 || cfg.k > ids.len() {
        return Err(CliError::Usage(format!("k must satisfy 1 <= k <= {}", ids.len())));
    }
    let workload = gen_workload(&ids, cfg.queries, cfg.k, cfg.zipf_s, cfg.seed);

    let mut profile = match &args.profile {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
            read_profile_csv(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?
        }
        None => profile_from_workload(&workload),
    };
    profile.cover_ids(ids.iter().copied());
    let sorted_ids = crate::hotness::sort_by_frequency(&profile);

    let costs: Vec<ChunkCost> = store.chunks.iter().map(ChunkCost::from_compressed).collect();
    // Baseline-only runs price the BF16 disk path on both sides, so every
    // speedup is exactly 1.
    let costs: Vec<ChunkCost> =
        if args.baseline_only { costs.iter().map(|c| c.as_bf16()).collect() } else { costs };
    let mode: AblationMode = if args.baseline_only { AblationMode::MpOnly } else { args.mode.into() };

    let model = cfg.cost_model();
    let inputs = SimInputs {
        costs: &costs,
        sorted_ids: &sorted_ids,
        tau_gpu: cfg.tau_gpu,
        tau_pin: cfg.tau_pin,
        tau_page: cfg.tau_page,
        workload: &workload,
        model: &model,
    };
    let report = run_arm(&inputs, mode).map_err(CliError::runtime)?;
    write_sim_outputs(&args, &report)?;
    print_summary(&report);
    Ok(())
}

fn write_sim_outputs(args: &SimulateArgs, report: &SimReport) -> CliResult {
    let mut out = create_out(&args.out)?;
    write_report_csv(&mut out, report).map_err(CliError::runtime)?;
    out.flush().map_err(CliError::runtime)?;
    let summary_path = args.summary.clone().unwrap_or_else(|| {
        let mut p = args.out.as_os_str().to_owned();
        p.push(".summary.csv");
        PathBuf::from(p)
    });
    let mut out = create_out(&summary_path)?;
    write_summary_csv(&mut out, &report.summary).map_err(CliError::runtime)?;
    out.flush().map_err(CliError::runtime)?;
    Ok(())
}

fn print_summary(report: &SimReport) {
    let s = &report.summary;
    println!(
        "queries={} mean_speedup={:.3} max_speedup={:.3} first_half={:.3} second_half={:.3}",
        report.rows.len(),
        s.mean_speedup,
        s.max_speedup,
        s.first_half_mean_speedup,
        s.second_half_mean_speedup
    );
    println!(
        "hits: gpu={} pin={} page={} disk={}",
        report.tier_hits[0], report.tier_hits[1], report.tier_hits[2], report.tier_hits[3]
    );
}
