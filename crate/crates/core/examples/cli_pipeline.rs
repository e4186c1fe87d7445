//! The whole `lta` command chain on a synthetic corpus in a temporary
//! directory, driven in-process.
//!
//! `cargo run --release --example cli_pipeline`

fn lta(args: &[&str]) {
    let code = lta::cli::run(std::iter::once("lta").chain(args.iter().copied()));
    assert_eq!(code, 0, "lta {}", args.join(" "));
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let (tax, train, test, dists) = (
        path("taxonomy.txt"),
        path("train.jsonl"),
        path("test.jsonl"),
        path("distributions.jsonl"),
    );
    let (matrix, rec, preds) = (
        path("cooccur.txt"),
        path("recognition.jsonl"),
        path("predictions.jsonl"),
    );

    lta(&["synth", "--out-dir", &path(""), "--seed", "3", "--test-clips", "200"]);
    lta(&[
        "build-cooccur",
        "--taxonomy",
        &tax,
        "--annotations",
        &train,
        "--out",
        &matrix,
    ]);
    lta(&[
        "recognize",
        "--taxonomy",
        &tax,
        "--distributions",
        &dists,
        "--matrix",
        &matrix,
        "--out",
        &rec,
    ]);
    lta(&[
        "anticipate",
        "--taxonomy",
        &tax,
        "--recognition",
        &rec,
        "--train",
        &train,
        "--out",
        &preds,
    ]);
    lta(&[
        "evaluate",
        "--taxonomy",
        &tax,
        "--predictions",
        &preds,
        "--annotations",
        &test,
        "--recognition",
        &rec,
        "--out",
        &path("eval.json"),
    ]);
    lta(&[
        "report",
        "--clip",
        "test_00000",
        "--taxonomy",
        &tax,
        "--annotations",
        &test,
        "--recognition",
        &rec,
        "--predictions",
        &preds,
    ]);
}
