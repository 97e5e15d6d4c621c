use polymut_core::verify::batch_verify;
use std::path::Path;

#[test]
fn shipped_corpus_passes() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/markov-depth3");
    let report = batch_verify(&dir).unwrap();
    assert_eq!(report.entries.len(), 6);
    for entry in &report.entries {
        assert!(entry.pass, "{entry:?}");
    }
    let markov: Vec<_> = report
        .entries
        .iter()
        .filter(|e| e.file.starts_with("markov"))
        .collect();
    assert!(markov.iter().all(|e| e.checks.len() == 3));
}
