use std::path::{Path, PathBuf};

use proptest::prelude::*;
use typeforge::embeddings::{load_embeddings, write_embeddings};
use typeforge::Error;

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn identity_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (store, report) = load_embeddings(&write(dir.path(), "a.txt", "2 2\na 1 0\nb 0 1\n"), true).unwrap();
    assert_eq!((store.len(), store.dim()), (2, 2));
    assert_eq!(store.get_vector("a").unwrap(), [1.0, 0.0]);
    assert_eq!(store.get_vector("b").unwrap(), [0.0, 1.0]);
    assert!(store.get_vector("zzz").is_none());
    assert_eq!(report.loaded, 2);
    assert!(report.skips.is_empty());
}

#[test]
fn three_four_five() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.txt", "1 2\na 3 4");
    let (store, _) = load_embeddings(&p, true).unwrap();
    let v = store.get_vector("a").unwrap();
    assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
    let (raw, _) = load_embeddings(&p, false).unwrap();
    assert_eq!(raw.get_vector("a").unwrap(), [3.0, 4.0]);
}

#[test]
fn zero_vector_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let (store, report) = load_embeddings(&write(dir.path(), "a.txt", "2 2\na 1 0\nb 0 0\n"), true).unwrap();
    assert_eq!(store.len(), 1);
    assert_eq!(report.skips.len(), 1);
    assert_eq!(report.skips[0].line, 3);
    assert_eq!(report.skips[0].reason, "degenerate vector");
}

#[test]
fn bad_rows_are_skipped_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let body = "4 3\na 1 0 0\nb 1 0\nc 1 x 0\n\nd 0 0 1 9\ne 0 1 0\n";
    let (store, report) = load_embeddings(&write(dir.path(), "a.txt", body), true).unwrap();
    assert_eq!(store.len(), 2);
    let got: Vec<(u64, &str)> = report.skips.iter().map(|s| (s.line, s.reason.as_str())).collect();
    assert_eq!(
        got,
        [
            (3, "wrong value count: expected 3, found 2"),
            (4, "unparseable value"),
            (6, "wrong value count: expected 3, found 4"),
        ]
    );
}

#[test]
fn malformed_header_is_fatal_on_line_one() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["a 1 0\n", "2\n", "", "x y\n"] {
        match load_embeddings(&write(dir.path(), "h.txt", body), true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{body:?}: expected parse error, got {other:?}"),
        }
    }
}

#[test]
fn duplicates_keep_last() {
    let dir = tempfile::tempdir().unwrap();
    let (store, report) = load_embeddings(&write(dir.path(), "a.txt", "3 2\na 1 0\nb 0 1\na 0 2\n"), true).unwrap();
    assert_eq!(store.len(), 2);
    assert_eq!(report.duplicates, 1);
    assert_eq!(store.get_vector("a").unwrap(), [0.0, 1.0]);
    assert_eq!(store.row_of("a"), Some(0));
}

#[test]
fn gzip_input() {
    use std::io::Write;
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.txt.gz");
    let mut enc = flate2::write::GzEncoder::new(std::fs::File::create(&p).unwrap(), flate2::Compression::fast());
    enc.write_all(b"1 2\na 3 4\n").unwrap();
    enc.finish().unwrap();
    let (store, _) = load_embeddings(&p, true).unwrap();
    assert!((store.get_vector("a").unwrap()[1] - 0.8).abs() < 1e-15);
}

#[test]
fn load_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.txt", "3 3\na 1 2 3\nb -1 0.5 2\nc 0.1 0.2 0.3\n");
    let (s1, r1) = load_embeddings(&p, true).unwrap();
    let (s2, r2) = load_embeddings(&p, true).unwrap();
    assert_eq!(r1, r2);
    assert!(s1.iter().zip(s2.iter()).all(|(a, b)| a == b));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn export_round_trip(rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 5), 1..40)) {
        prop_assume!(rows.iter().all(|r| r.iter().map(|x| x * x).sum::<f64>() > 1e-6));
        let dir = tempfile::tempdir().unwrap();
        let mut body = format!("{} 5\n", rows.len());
        for (i, r) in rows.iter().enumerate() {
            body.push_str(&format!("e{i}"));
            for x in r {
                body.push_str(&format!(" {x}"));
            }
            body.push('\n');
        }
        let (store, _) = load_embeddings(&write(dir.path(), "in.txt", &body), true).unwrap();
        for (_, v) in store.iter() {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() <= 1e-9);
        }
        let out = dir.path().join("out.txt.gz");
        write_embeddings(&store, &out).unwrap();
        let (back, _) = load_embeddings(&out, false).unwrap();
        prop_assert_eq!(back.len(), store.len());
        for ((ia, a), (ib, b)) in store.iter().zip(back.iter()) {
            prop_assert_eq!(ia, ib);
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
