//! End-to-end tests of the `rei` binary: happy paths, error handling,
//! idempotence, and the stdout/stderr split.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rei() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rei"))
}

fn write_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let logs = dir.join("logs.txt");
    let queries = dir.join("queries.txt");
    fs::write(
        &logs,
        "error: disk full at vmID=77\n\
         info: heartbeat ok\n\
         error: disk full at vmID=12\n\
         info: started vmName=web01\n\
         warn: retrying rpc\n",
    )
    .unwrap();
    fs::write(&queries, "error: .*vmID=\\d+\nvmName=web\\d+\nheartbeat\n").unwrap();
    (logs, queries)
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn build_then_query_prints_matching_ids() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let index = dir.path().join("idx.rei");

    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .args(["--n", "3", "--k", "16", "--m", "1", "--strategy", "freq", "--out"])
        .arg(&index)
        .output()
        .unwrap();
    assert!(build.status.success(), "stderr: {}", stderr(&build));
    // Data stream stays clean: everything build reports is diagnostics.
    assert_eq!(stdout(&build), "");
    assert!(index.exists());

    let query = rei()
        .args(["query", "--index"])
        .arg(&index)
        .arg("--logs")
        .arg(&logs)
        .args(["--pattern", "error: .*vmID=\\d+"])
        .output()
        .unwrap();
    assert!(query.status.success(), "stderr: {}", stderr(&query));
    assert_eq!(stdout(&query), "0\n2\n");
    let summary = stderr(&query);
    assert!(summary.contains("matches: 2"), "summary: {summary}");
    assert!(summary.contains("lines scanned: 2/5"), "summary: {summary}");
}

#[test]
fn build_and_query_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let first = dir.path().join("a.rei");
    let second = dir.path().join("b.rei");

    for out in [&first, &second] {
        let build = rei()
            .args(["build", "--logs"])
            .arg(&logs)
            .arg("--queries")
            .arg(&queries)
            .args(["--n", "2", "--k", "8", "--m", "2", "--strategy", "bene", "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(build.status.success(), "stderr: {}", stderr(&build));
    }
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    let run = || {
        let query = rei()
            .args(["query", "--index"])
            .arg(&first)
            .arg("--logs")
            .arg(&logs)
            .args(["--pattern", "heartbeat"])
            .output()
            .unwrap();
        assert!(query.status.success(), "stderr: {}", stderr(&query));
        stdout(&query)
    };
    assert_eq!(run(), run());
}

#[test]
fn query_rejects_a_changed_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let index = dir.path().join("idx.rei");
    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .args(["--n", "3", "--k", "8", "--m", "1", "--out"])
        .arg(&index)
        .output()
        .unwrap();
    assert!(build.status.success(), "stderr: {}", stderr(&build));

    // Same line count, different content: only the digest can tell.
    let edited = dir.path().join("edited.txt");
    let mut text = fs::read_to_string(&logs).unwrap();
    text = text.replace("vmID=77", "vmID=99");
    fs::write(&edited, &text).unwrap();
    let query = rei()
        .args(["query", "--index"])
        .arg(&index)
        .arg("--logs")
        .arg(&edited)
        .args(["--pattern", "heartbeat"])
        .output()
        .unwrap();
    assert!(!query.status.success());
    assert!(stderr(&query).contains("digest"), "stderr: {}", stderr(&query));

    // A different line count is reported as such.
    let longer = dir.path().join("longer.txt");
    fs::write(&longer, format!("{text}one more line\n")).unwrap();
    let query = rei()
        .args(["query", "--index"])
        .arg(&index)
        .arg("--logs")
        .arg(&longer)
        .args(["--pattern", "heartbeat"])
        .output()
        .unwrap();
    assert!(!query.status.success());
    assert!(stderr(&query).contains("lines"), "stderr: {}", stderr(&query));
}

#[test]
fn pattern_without_literals_scans_everything() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let index = dir.path().join("idx.rei");
    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .args(["--n", "3", "--k", "8", "--m", "1", "--out"])
        .arg(&index)
        .output()
        .unwrap();
    assert!(build.status.success(), "stderr: {}", stderr(&build));

    let query = rei()
        .args(["query", "--index"])
        .arg(&index)
        .arg("--logs")
        .arg(&logs)
        .args(["--pattern", "\\d+"])
        .output()
        .unwrap();
    assert!(query.status.success(), "stderr: {}", stderr(&query));
    assert!(
        stderr(&query).contains("lines scanned: 5/5"),
        "summary: {}",
        stderr(&query)
    );
}

#[test]
fn zero_k_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .args(["--k", "0", "--out"])
        .arg(dir.path().join("idx.rei"))
        .output()
        .unwrap();
    assert_eq!(build.status.code(), Some(2), "stderr: {}", stderr(&build));
    assert!(stderr(&build).contains("at least 1"), "stderr: {}", stderr(&build));
}

#[test]
fn english_strategy_needs_no_queries() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, _) = write_fixture(dir.path());
    let index = dir.path().join("idx.rei");
    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .args(["--strategy", "english", "--n", "2", "--k", "64", "--out"])
        .arg(&index)
        .output()
        .unwrap();
    assert!(build.status.success(), "stderr: {}", stderr(&build));
    assert!(index.exists());
}

#[test]
fn english_ranking_can_be_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, _) = write_fixture(dir.path());
    let ranking = dir.path().join("ranking.tsv");
    fs::write(&ranking, "er\t100\nin\t60\nvm\t10\n").unwrap();
    let index = dir.path().join("idx.rei");
    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .args(["--strategy", "english", "--n", "2", "--k", "2", "--english-ranking"])
        .arg(&ranking)
        .arg("--out")
        .arg(&index)
        .output()
        .unwrap();
    assert!(build.status.success(), "stderr: {}", stderr(&build));
}

#[test]
fn other_strategies_require_queries() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, _) = write_fixture(dir.path());
    let build = rei()
        .args(["build", "--logs"])
        .arg(&logs)
        .args(["--strategy", "freq", "--out"])
        .arg(dir.path().join("idx.rei"))
        .output()
        .unwrap();
    assert!(!build.status.success());
    assert!(stderr(&build).contains("--queries"), "stderr: {}", stderr(&build));
}

#[test]
fn bench_emits_one_csv_row_per_config() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let bench = rei()
        .args(["bench", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .args(["--kinds", "bitvector,inverted", "--k", "4,8", "--runs", "3"])
        .output()
        .unwrap();
    assert!(bench.status.success(), "stderr: {}", stderr(&bench));
    let csv = stdout(&bench);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "kind,n,k,m,build_s,index_bytes,match_s,pass_pct");
    assert_eq!(lines.len(), 5, "csv: {csv}");
    assert!(lines[1].starts_with("bitvector,3,4,1,"));
    assert!(lines[4].starts_with("inverted,3,8,1,"));
}

#[test]
fn tune_prints_the_ranked_table() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());
    let tune = rei()
        .args(["tune", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .args(["--n", "3", "--budget", "1KB", "--granularities", "1,2"])
        .output()
        .unwrap();
    assert!(tune.status.success(), "stderr: {}", stderr(&tune));
    let table = stdout(&tune);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "m\tk\tscore\tsize_bits\tstorage_bytes\tefficiency");
    assert_eq!(lines.len(), 3, "table: {table}");
    assert!(stderr(&tune).contains("best: k="), "stderr: {}", stderr(&tune));
}

#[test]
fn stats_prints_requested_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, queries) = write_fixture(dir.path());

    let zipf = rei()
        .args(["stats", "--zipf-d", "26", "--zipf-a", "1.1"])
        .output()
        .unwrap();
    assert!(zipf.status.success(), "stderr: {}", stderr(&zipf));
    assert!(
        stdout(&zipf).starts_with("zipf_anomaly_probability 0.24"),
        "stdout: {}",
        stdout(&zipf)
    );

    let sel = rei()
        .args(["stats", "--gram", "error", "--logs"])
        .arg(&logs)
        .output()
        .unwrap();
    assert!(sel.status.success(), "stderr: {}", stderr(&sel));
    assert_eq!(stdout(&sel), "selectivity 0.600000\n");

    let compare = rei()
        .args(["stats", "--compare", "freq,bene", "--n", "3", "--k", "8", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .output()
        .unwrap();
    assert!(compare.status.success(), "stderr: {}", stderr(&compare));
    assert!(
        stdout(&compare).starts_with("intersection_percentage "),
        "stdout: {}",
        stdout(&compare)
    );

    let overlap = rei()
        .args(["stats", "--overlap", "--k", "8", "--logs"])
        .arg(&logs)
        .arg("--queries")
        .arg(&queries)
        .output()
        .unwrap();
    assert!(overlap.status.success(), "stderr: {}", stderr(&overlap));
    assert!(
        stdout(&overlap).starts_with("bigram_in_trigram_overlap "),
        "stdout: {}",
        stdout(&overlap)
    );
}

#[test]
fn stats_without_metrics_fails() {
    let stats = rei().arg("stats").output().unwrap();
    assert!(!stats.status.success());
    assert!(stderr(&stats).contains("nothing to compute"), "stderr: {}", stderr(&stats));
}
