use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use parse_ensemble::report::strip_manifest;
use parse_ensemble::synthetic::ToyGrammar;
use parse_ensemble::treebank::write_trees;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parse-ensemble"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn parsers() -> Vec<String> {
    ["a.mrg", "b.mrg", "c.mrg"]
        .iter()
        .map(|f| fixture(f).display().to_string())
        .collect()
}

fn toy_corpus(dir: &Path, name: &str, seed: u64, n: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = dir.join(name);
    std::fs::write(&path, write_trees(&ToyGrammar::default().corpus(&mut rng, n)).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn simulate_prints_six_rows() {
    let out = stdout(&run(&["simulate"]));
    assert!(out.starts_with("# tool: parse-ensemble"));
    let body = strip_manifest(&out);
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("1,1/3,1/3,1/3,a+,1/3,1/2,"));
    assert!(rows[5].starts_with("6,5/12,1/2,1/12,a-,5/12,5/7,"));
    assert_eq!(out, stdout(&run(&["simulate"])));
}

#[test]
fn threshold_two_vote_golden_forest() {
    let p = parsers();
    let out = stdout(&run(&["combine", "--mode", "vote", "--threshold", "2", &p[0], &p[1], &p[2]]));
    // Sentence 1: S, NP(0,2) and VP(2,5) have two votes; the period follows
    // its left neighbour into VP. Sentence 2: parser b failed, only S and NP
    // reach two votes. Sentence 3: every parser failed.
    assert_eq!(
        out,
        "(TOP (S (NP (DT the) (NN dog)) (VP (VBD saw) (DT a) (NN cat) (. .))))\n\
         (TOP (S (NP (PRP it)) (VBZ works)))\n\
         \n"
    );
}

#[test]
fn combine_writes_manifest_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("forest.mrg");
    let p = parsers();
    let t = target.display().to_string();
    stdout(&run(&["combine", "--mode", "consensus", "-o", &t, &p[0], &p[1], &p[2]]));
    let manifest = std::fs::read_to_string(dir.path().join("forest.mrg.manifest")).unwrap();
    assert!(manifest.contains("# distance: kronecker\n"));
    assert!(manifest.contains("# threshold: 1\n"));
    assert_eq!(manifest.matches("sha256:").count(), 3);
    assert_eq!(std::fs::read_to_string(&target).unwrap().lines().count(), 3);
}

#[test]
fn eval_reports_counts() {
    let gold = fixture("gold.mrg").display().to_string();
    let p = parsers();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let out = stdout(&run(&["eval", "--guess", &p[0], "--gold", &gold, "--out", &d]));
    // Perfect on the first two sentences; the third is a failure, so its three
    // gold constituents are recall errors.
    assert!(strip_manifest(&out).ends_with("\n3,7,0,3,1.000000,0.700000,0.850000,0.823529,0.666667\n"));
    for f in ["summary.csv", "per_label.csv", "per_parent.csv", "recall_errors.csv"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.starts_with("# tool: "), "{f}");
    }
    let recall = std::fs::read_to_string(dir.path().join("recall_errors.csv")).unwrap();
    assert!(recall.contains("\nS,1,0.333333\n"));
}

#[test]
fn switch_and_oracle() {
    let gold = fixture("gold.mrg").display().to_string();
    let p = parsers();
    let dir = tempfile::tempdir().unwrap();
    let choices = dir.path().join("choices.csv").display().to_string();
    let forest = stdout(&run(&["switch", "--method", "distance", "--choices", &choices, &p[0], &p[1], &p[2]]));
    assert_eq!(forest.lines().count(), 3);
    let csv = strip_manifest(&std::fs::read_to_string(&choices).unwrap());
    assert!(csv.contains("\n1,3,false,6,9,5\n"));

    let out = strip_manifest(&stdout(&run(&["oracle", "--gold", &gold, &p[0], &p[1], &p[2]])));
    assert!(out.contains("\nswitch_oracle,3,7,0,3,"));
}

#[test]
fn align_kronecker_counts_symmetric_difference() {
    let p = parsers();
    let out = strip_manifest(&stdout(&run(&["align", &p[0], &p[2]])));
    assert!(out.contains("\n1,1,3,5,NP,,,NULL,1\n"));
    assert!(out.contains("\n2,1,1,2,VP,,,NULL,1\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "--nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["combine", "--mode", "telepathy", "x.mrg"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--guess", "/no/such/file", "--gold", "/no/such/file"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mrg");
    std::fs::write(&bad, "(TOP (S (N a)\n").unwrap();
    let b = bad.display().to_string();
    assert_eq!(run(&["eval", "--guess", &b, "--gold", &b]).status.code(), Some(2));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn bagging_is_reproducible_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let train = toy_corpus(dir.path(), "train.mrg", 1, 150);
    let test = toy_corpus(dir.path(), "test.mrg", 2, 40);
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("bag{jobs}"));
        let o = out.display().to_string();
        let printed = stdout(&run(&[
            "--jobs", jobs, "bag", "--corpus", &train, "--test", &test, "--k", "4", "--seed", "9", "--out", &o,
        ]));
        assert!(strip_manifest(&printed).starts_with("system,f_measure\nensemble,"));
        let members = std::fs::read_to_string(out.join("members.csv")).unwrap();
        assert_eq!(strip_manifest(&members).lines().count(), 5);
        assert!(out.join("member-04.model").exists());
        outputs.push((printed, members, std::fs::read(out.join("scores.csv")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn boosting_ledger_feeds_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let train = toy_corpus(dir.path(), "train.mrg", 3, 120);
    let out = dir.path().join("boost");
    let o = out.display().to_string();
    stdout(&run(&["boost", "--corpus", &train, "-T", "3", "--alpha", "f", "--seed", "4", "--out", &o]));
    let ledger = strip_manifest(&std::fs::read_to_string(out.join("ledger.csv")).unwrap());
    assert_eq!(ledger.lines().count(), 4);
    let weights = out.join("weights.csv").display().to_string();
    let diag = dir.path().join("diag");
    let d = diag.display().to_string();
    stdout(&run(&["diagnose", "--weights", &weights, "--corpus", &train, "--bins", "5", "--top", "3", "--out", &d]));
    let bins = strip_manifest(&std::fs::read_to_string(diag.join("bins.csv")).unwrap());
    // Four snapshots of five bins each.
    assert_eq!(bins.lines().count(), 1 + 4 * 5);
    let heaviest = strip_manifest(&std::fs::read_to_string(diag.join("heaviest.csv")).unwrap());
    assert_eq!(heaviest.lines().count(), 4);
    assert!(heaviest.contains("\"(TOP "));
}

#[test]
fn memorization_check_trims_unlearnable() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.mrg");
    std::fs::write(&corpus, "(TOP (S (N a) (V b)))\n(TOP (X (Y (A a)) (Y (A a)) (Y (Z (A a)))))\n").unwrap();
    let c = corpus.display().to_string();
    let d = dir.path().join("diag").display().to_string();
    let out = stdout(&run(&["diagnose", "--corpus", &c, "--out", &d]));
    assert_eq!(out, "1 of 2 samples unlearnable\n");
    let trimmed = std::fs::read_to_string(dir.path().join("diag/trimmed.mrg")).unwrap();
    assert_eq!(trimmed.trim(), "(TOP (S (N a) (V b)))");
}
