//! Release gate: runs every acceptance criterion at its stated tolerance and
//! fails if any one of them does. One pass/fail line per criterion is printed
//! by the suite (visible with `--nocapture`, or via `rbm-lab all-acceptance`).

use rbm_lab::acceptance::{run_all, AcceptanceOptions};

#[test]
fn acceptance_criteria() {
    let scratch = tempfile::tempdir().unwrap();
    let opts = AcceptanceOptions {
        workers: 0,
        scratch: scratch.path().to_path_buf(),
    };
    let results = run_all(&opts).expect("acceptance suite completes");
    assert_eq!(results.len(), 11);
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("criterion {} ({}): {}", r.id, r.name, r.detail))
        .collect();
    assert!(
        failed.is_empty(),
        "{} acceptance criteria failed:\n{}",
        failed.len(),
        failed.join("\n")
    );
}
