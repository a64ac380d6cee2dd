//! Text model files.
//!
//! ```text
//! typeforge-model 1
//! dim <d>
//! types <n>
//! <type IRI>\t<support>\t<v1>\t...\t<vd>      (n lines, sorted by IRI)
//! ```
//!
//! Floats are written in shortest round-trip form, so save followed by load
//! reproduces every vector bit for bit.

use std::io::Write;
use std::path::Path;

use typeforge_core::TypeEmbeddingModel;

use crate::error::{Error, Result};
use crate::io::{create_writer, open_reader, read_line};

pub const MAGIC: &str = "typeforge-model";
pub const VERSION: u32 = 1;

pub fn save_model(model: &TypeEmbeddingModel, path: &Path) -> Result<()> {
    let mut w = create_writer(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{MAGIC} {VERSION}").map_err(io_err)?;
    writeln!(w, "dim {}", model.dim()).map_err(io_err)?;
    writeln!(w, "types {}", model.len()).map_err(io_err)?;
    for (id, iri, v) in model.iter() {
        write!(w, "{iri}\t{}", model.support(id)).map_err(io_err)?;
        for x in v {
            write!(w, "\t{x}").map_err(io_err)?;
        }
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn header_value(path: &Path, line: &str, key: &str, n: u64) -> Result<usize> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: n,
            message: format!("expected \"{key} <count>\", found {line:?}"),
        })
}

pub fn load_model(path: &Path) -> Result<TypeEmbeddingModel> {
    let mut reader = open_reader(path)?;
    let (mut raw, mut line) = (Vec::new(), String::new());
    let mut next = |n: u64, what: &str| -> Result<String> {
        if read_line(reader.as_mut(), &mut raw, &mut line).map_err(|e| Error::io(path, e))? {
            Ok(line.clone())
        } else {
            Err(Error::format(path, format!("truncated model file: missing {what} (line {n})")))
        }
    };

    let magic = next(1, "header")?;
    let version = magic
        .strip_prefix(MAGIC)
        .and_then(|r| r.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::format(path, format!("not a model file (header {magic:?})")))?;
    if version != VERSION {
        return Err(Error::format(
            path,
            format!("unsupported model version {version}, expected {VERSION}"),
        ));
    }
    let dim = header_value(path, &next(2, "dim")?, "dim", 2)?;
    let count = header_value(path, &next(3, "types")?, "types", 3)?;

    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let n = 4 + i as u64;
        let l = next(n, "type record")?;
        let mut fields = l.split('\t');
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: n,
            message,
        };
        let iri = fields.next().filter(|s| !s.is_empty()).ok_or_else(|| bad("empty type IRI".into()))?;
        let support = fields
            .next()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| bad("bad support count".into()))?;
        let v: Vec<f64> = fields
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("bad vector value: {e}")))?;
        if v.len() != dim {
            return Err(bad(format!("expected {dim} values, found {}", v.len())));
        }
        records.push((iri.to_string(), support, v));
    }
    Ok(TypeEmbeddingModel::from_records(dim, records)?)
}
