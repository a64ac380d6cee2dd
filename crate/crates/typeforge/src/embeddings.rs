//! word2vec text-format entity embeddings.
//!
//! ```text
//! N d
//! token v1 v2 ... vd
//! ```
//!
//! A malformed header is fatal. Rows with the wrong value count, unparseable
//! numbers, or a (near-)zero norm are skipped and reported. A token seen
//! twice keeps its last vector.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use typeforge_core::{EntityEmbeddingStore, InsertOutcome};

use crate::error::{Error, Result};
use crate::io::{create_writer, open_reader, read_line};
use crate::report::SkipRecord;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub header_rows: u64,
    pub dim: usize,
    pub loaded: u64,
    pub duplicates: u64,
    #[serde(skip)]
    pub skips: Vec<SkipRecord>,
}

fn parse_header(line: &str) -> Option<(u64, usize)> {
    let mut it = line.split_ascii_whitespace();
    let n = it.next()?.parse().ok()?;
    let d: usize = it.next()?.parse().ok()?;
    (it.next().is_none() && d > 0).then_some((n, d))
}

/// Loads a word2vec text file (optionally `.gz`/`.bz2`). With `normalize`
/// every stored row has unit length.
pub fn load_embeddings(path: &Path, normalize: bool) -> Result<(EntityEmbeddingStore, LoadReport)> {
    let mut reader = open_reader(path)?;
    let (mut raw, mut line) = (Vec::new(), String::new());
    let io_err = |e| Error::io(path, e);

    if !read_line(reader.as_mut(), &mut raw, &mut line).map_err(io_err)? {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "missing header line \"N d\"".into(),
        });
    }
    let (rows, dim) = parse_header(&line).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: format!("malformed header {line:?}, expected \"N d\""),
    })?;

    let mut store = EntityEmbeddingStore::with_capacity(dim, rows.min(1 << 24) as usize);
    let mut report = LoadReport {
        header_rows: rows,
        dim,
        ..LoadReport::default()
    };
    let mut values = Vec::with_capacity(dim);
    let mut n = 1u64;
    while read_line(reader.as_mut(), &mut raw, &mut line).map_err(io_err)? {
        n += 1;
        let mut fields = line.split_ascii_whitespace();
        let Some(token) = fields.next() else {
            continue;
        };
        values.clear();
        let mut bad_number = false;
        for f in fields {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    bad_number = true;
                    break;
                }
            }
        }
        if bad_number {
            report.skips.push(SkipRecord::new(path, n, "unparseable value"));
            continue;
        }
        match store.insert(token, &values, normalize) {
            InsertOutcome::Inserted => report.loaded += 1,
            InsertOutcome::Replaced => report.duplicates += 1,
            InsertOutcome::Degenerate => report.skips.push(SkipRecord::new(path, n, "degenerate vector")),
            InsertOutcome::WrongDimension { found } => report.skips.push(SkipRecord::new(
                path,
                n,
                format!("wrong value count: expected {dim}, found {found}"),
            )),
        }
    }
    if report.duplicates > 0 {
        log::warn!("{}: {} duplicate tokens, last occurrence kept", path.display(), report.duplicates);
    }
    if store.len() as u64 != rows {
        log::info!(
            "{}: header announces {rows} rows, {} loaded",
            path.display(),
            store.len()
        );
    }
    Ok((store, report))
}

/// Writes the store back in the same text format. Values use the shortest
/// representation that parses back to the identical `f64`.
pub fn write_embeddings(store: &EntityEmbeddingStore, path: &Path) -> Result<()> {
    let mut w = create_writer(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{} {}", store.len(), store.dim()).map_err(io_err)?;
    for (id, v) in store.iter() {
        w.write_all(id.as_bytes()).map_err(io_err)?;
        for x in v {
            write!(w, " {x}").map_err(io_err)?;
        }
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
