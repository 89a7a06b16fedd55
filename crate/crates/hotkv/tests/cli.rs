//! End-to-end tests of the command-line surface: exit codes, file outputs,
//! and agreement between CLI runs and direct library calls.

use std::path::{Path, PathBuf};
use std::process::Command;

use hotkv::codec::{compress, decompress};
use hotkv::hotness::partition_by_hotness;
use hotkv::sim::{gen_workload, profile_from_workload, run_arm, AblationMode, ChunkCost, SimInputs};
use hotkv::store::{read_corpus, read_store};
use hotkv::{sort_by_frequency, CostModel, RunConfig, Scheme};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_hotkv")
}

fn run_ok(args: &[&str]) -> String {
    let out = Command::new(exe()).args(args).output().expect("spawn hotkv");
    assert!(
        out.status.success(),
        "hotkv {args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_expect_code(args: &[&str], code: i32) -> String {
    let out = Command::new(exe()).args(args).output().expect("spawn hotkv");
    assert_eq!(
        out.status.code(),
        Some(code),
        "hotkv {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stderr).unwrap()
}

struct SmallPipeline {
    corpus: PathBuf,
    profile: PathBuf,
    store: PathBuf,
}

/// gen-corpus + profile + compress at a small scale under `dir`.
fn small_pipeline(dir: &Path) -> SmallPipeline {
    let corpus = dir.join("corpus.hkvc");
    let profile = dir.join("profile.csv");
    let store = dir.join("store.harg");
    run_ok(&[
        "gen-corpus", "--docs", "30", "--tokens", "16", "--width", "8", "--seed", "5",
        "--out", corpus.to_str().unwrap(),
    ]);
    run_ok(&[
        "profile", "--corpus", corpus.to_str().unwrap(), "--queries", "300", "--k", "4",
        "--seed", "5", "--out", profile.to_str().unwrap(),
    ]);
    run_ok(&[
        "compress", corpus.to_str().unwrap(), "--profile", profile.to_str().unwrap(),
        "--out", store.to_str().unwrap(),
    ]);
    SmallPipeline { corpus, profile, store }
}

#[test]
fn gen_corpus_validates_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.hkvc");
    let stdout = run_ok(&[
        "gen-corpus", "--docs", "3", "--tokens", "4", "--width", "2", "--seed", "1",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(stdout.contains("wrote 6 chunks"), "{stdout}");
    let chunks = read_corpus(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(chunks.len(), 6);

    let err = run_expect_code(
        &["gen-corpus", "--docs", "0", "--out", out.to_str().unwrap()],
        2,
    );
    assert!(err.contains("at least 1"), "{err}");
}

#[test]
fn unknown_flags_and_subcommands_exit_2() {
    run_expect_code(&["gen-corpus", "--nonsense"], 2);
    run_expect_code(&["frobnicate"], 2);
    let out = Command::new(exe()).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_input_files_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    run_expect_code(&["analyze", "/nonexistent.hkvc", "--out", out.to_str().unwrap()], 1);
}

#[test]
fn analyze_reports_ranges_coverage_and_rmse() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let csv = dir.path().join("analysis.csv");
    run_ok(&["analyze", p.corpus.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "chunk_id,kind,min,max,top1,top4,top8,rmse_int8,rmse_fp8e4m3,rmse_fp8e5m2,rmse_gse8"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 60, "one row per chunk");
    let mut top8_sum = 0.0;
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        let (top4, top8): (f64, f64) = (cols[5].parse().unwrap(), cols[6].parse().unwrap());
        assert!(top8 >= top4, "coverage must be monotone in k: {row}");
        top8_sum += top8;
    }
    // The synthetic generator concentrates exponents heavily.
    assert!(top8_sum / rows.len() as f64 >= 0.90);
}

#[test]
fn analyze_rejects_corrupt_corpus_naming_the_offset() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let mut bytes = std::fs::read(&p.corpus).unwrap();
    let n = bytes.len();
    bytes.truncate(n - 5);
    let bad = dir.path().join("bad.hkvc");
    std::fs::write(&bad, bytes).unwrap();
    let err = run_expect_code(
        &["analyze", bad.to_str().unwrap(), "--out", dir.path().join("x.csv").to_str().unwrap()],
        1,
    );
    assert!(err.contains("byte"), "error should name a byte offset: {err}");
}

#[test]
fn profile_total_equals_queries_times_k() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let text = std::fs::read_to_string(&p.profile).unwrap();
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 300 * 4);
    let rows = text.lines().skip(1).count();
    assert_eq!(rows, 60, "every corpus id listed, including zero-count ones");
}

#[test]
fn compress_assigns_schemes_by_partition_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let store = read_store(&std::fs::read(&p.store).unwrap()).unwrap();
    assert_eq!(store.chunks.len(), 60);

    // Scheme histogram follows floor(0.1 * 60) = 6 per hot group.
    let mut histogram = [0usize; 4];
    for c in &store.chunks {
        histogram[c.scheme as usize] += 1;
    }
    assert_eq!(histogram, [6, 6, 6, 42]);

    // Store round-trip: records equal a fresh codec run under the same partition.
    let corpus = read_corpus(&std::fs::read(&p.corpus).unwrap()).unwrap();
    let profile_text = std::fs::read_to_string(&p.profile).unwrap();
    let profile = hotkv::store::read_profile_csv(&profile_text).unwrap();
    let cfg = RunConfig::default();
    let partition = partition_by_hotness(&profile, cfg.compression_taus()).unwrap();
    for (chunk, record) in corpus.iter().zip(&store.chunks) {
        let direct = compress(chunk, partition.scheme_for(chunk.id()).unwrap(), store.layout);
        assert_eq!(record, &direct, "chunk {} differs from direct encode", chunk.id());
        assert_eq!(decompress(record).unwrap(), decompress(&direct).unwrap());
    }
}

#[test]
fn compress_reports_missing_profile_ids() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    std::fs::write(dir.path().join("short.csv"), "chunk_id,count\n0,5\n").unwrap();
    let err = run_expect_code(
        &[
            "compress", p.corpus.to_str().unwrap(), "--profile",
            dir.path().join("short.csv").to_str().unwrap(), "--out",
            dir.path().join("s.harg").to_str().unwrap(),
        ],
        1,
    );
    assert!(err.contains("does not cover corpus chunk id 1"), "{err}");
}

#[test]
fn simulate_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let report = dir.path().join("report.csv");
    let stdout = run_ok(&[
        "simulate", p.store.to_str().unwrap(), "--queries", "200", "--k", "4", "--seed", "5",
        "--out", report.to_str().unwrap(),
    ]);
    assert!(stdout.contains("mean_speedup="), "{stdout}");
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "query_idx,ha_latency_us,baseline_latency_us,speedup,gpu_hits,pin_hits,page_hits,disk_loads"
    );
    assert_eq!(text.lines().count(), 201);
    let summary = std::fs::read_to_string(dir.path().join("report.csv.summary.csv")).unwrap();
    assert!(summary.starts_with("mean_speedup,max_speedup,"));
}

#[test]
fn simulate_baseline_only_pins_speedup_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let report = dir.path().join("base.csv");
    run_ok(&[
        "simulate", p.store.to_str().unwrap(), "--queries", "100", "--k", "3", "--seed", "5",
        "--baseline-only", "--out", report.to_str().unwrap(),
    ]);
    for line in std::fs::read_to_string(&report).unwrap().lines().skip(1) {
        let speedup: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(speedup, 1.0, "{line}");
    }
}

#[test]
fn simulate_mode_flag_matches_library_ablation_arm() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let report = dir.path().join("mp.csv");
    run_ok(&[
        "simulate", p.store.to_str().unwrap(), "--queries", "150", "--k", "4", "--seed", "9",
        "--mode", "mp-only", "--out", report.to_str().unwrap(),
    ]);
    let cli_text = std::fs::read_to_string(&report).unwrap();

    // Reproduce the same run through the library.
    let store = read_store(&std::fs::read(&p.store).unwrap()).unwrap();
    let ids: Vec<u32> = store.chunks.iter().map(|c| c.id).collect();
    let cfg = RunConfig { seed: 9, ..RunConfig::default() };
    let workload = gen_workload(&ids, 150, 4, cfg.zipf_s, cfg.seed);
    let mut profile = profile_from_workload(&workload);
    profile.cover_ids(ids.iter().copied());
    let sorted_ids = sort_by_frequency(&profile);
    let costs: Vec<ChunkCost> = store.chunks.iter().map(ChunkCost::from_compressed).collect();
    let model = CostModel::default();
    let inputs = SimInputs {
        costs: &costs,
        sorted_ids: &sorted_ids,
        tau_gpu: cfg.tau_gpu,
        tau_pin: cfg.tau_pin,
        tau_page: cfg.tau_page,
        workload: &workload,
        model: &model,
    };
    let lib_report = run_arm(&inputs, AblationMode::MpOnly).unwrap();
    let mut lib_text = Vec::new();
    hotkv::store::report::write_report_csv(&mut lib_text, &lib_report).unwrap();
    assert_eq!(cli_text, String::from_utf8(lib_text).unwrap());
}

#[test]
fn config_file_feeds_commands_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "docs=4\ntokens=8\nwidth=4\nseed=77\n").unwrap();
    let out = dir.path().join("c.hkvc");
    run_ok(&[
        "gen-corpus", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(read_corpus(&std::fs::read(&out).unwrap()).unwrap().len(), 8);

    // Flag wins over the file.
    run_ok(&[
        "gen-corpus", "--config", cfg_path.to_str().unwrap(), "--docs", "2",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(read_corpus(&std::fs::read(&out).unwrap()).unwrap().len(), 4);

    std::fs::write(&cfg_path, "bogus_key=1\n").unwrap();
    let err = run_expect_code(
        &["gen-corpus", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()],
        2,
    );
    assert!(err.contains("unknown key"), "{err}");
}

#[test]
fn compress_prints_a_ratio_near_two() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.hkvc");
    let profile = dir.path().join("p.csv");
    let store = dir.path().join("s.harg");
    // 512-token chunks as in the headline ratio measurement.
    run_ok(&[
        "gen-corpus", "--docs", "4", "--tokens", "512", "--width", "16", "--seed", "3",
        "--out", corpus.to_str().unwrap(),
    ]);
    run_ok(&[
        "profile", "--corpus", corpus.to_str().unwrap(), "--queries", "64", "--k", "2",
        "--seed", "3", "--out", profile.to_str().unwrap(),
    ]);
    let stdout = run_ok(&[
        "compress", corpus.to_str().unwrap(), "--profile", profile.to_str().unwrap(),
        "--out", store.to_str().unwrap(),
    ]);
    let ratio: f64 = stdout
        .split("ratio ")
        .nth(1)
        .and_then(|s| s.trim_end().trim_end_matches(')').parse().ok())
        .unwrap_or_else(|| panic!("no ratio in {stdout}"));
    assert!((1.99..=2.0).contains(&ratio), "{stdout}");
    // With 8 chunks and 10% thresholds every floor(0.1 * 8) boundary is 0,
    // so everything lands in the coldest group.
    let store = read_store(&std::fs::read(&store).unwrap()).unwrap();
    assert!(store.chunks.iter().all(|c| c.scheme == Scheme::Gse8));
}
