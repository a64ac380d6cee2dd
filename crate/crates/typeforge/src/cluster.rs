//! Labelling every embedded entity with its top-k types, written as sharded
//! JSON-lines files.
//!
//! Each worker owns a contiguous row range and one output file, and keeps a
//! single reusable line buffer; memory use does not grow with the number of
//! entities.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use typeforge_core::{EntityEmbeddingStore, Normalizer, Recommender, TypeEmbeddingModel, TypeScorer};

use crate::error::{Error, Result};
use crate::io::create_writer;

/// Lines are flushed to the writer in batches of about this many bytes,
/// always at a line boundary.
pub const FLUSH_BYTES: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterOptions {
    pub top_k: usize,
    pub gzip: bool,
    /// Worker count; 0 and 1 both mean sequential.
    pub threads: usize,
    pub normalizer: Normalizer,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            top_k: 5,
            gzip: false,
            threads: 1,
            normalizer: Normalizer::Softmax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub entities: usize,
    pub types: usize,
    pub top_k: usize,
    pub files: Vec<PathBuf>,
    pub output_bytes: u64,
    pub seconds: f64,
    pub entities_per_second: f64,
}


pub fn shard_path(dir: &Path, shard: usize, gzip: bool) -> PathBuf {
    let ext = if gzip { "jsonl.gz" } else { "jsonl" };
    dir.join(format!("part-{shard:05}.{ext}"))
}

#[derive(Serialize)]
struct Line<'a> {
    entity: &'a str,
    types: Vec<(&'a str, f64)>,
}

pub fn cluster_all(
    model: &TypeEmbeddingModel,
    store: &EntityEmbeddingStore,
    out_dir: &Path,
    opts: &ClusterOptions,
) -> Result<ClusterSummary> {
    if opts.top_k == 0 {
        return Err(Error::Data("top-k must be at least 1".into()));
    }
    if model.dim() != store.dim() {
        return Err(typeforge_core::Error::DimensionMismatch {
            expected: model.dim(),
            found: store.dim(),
        }
        .into());
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let started = Instant::now();
    let n = store.len();
    let shards = opts.threads.max(1).min(n.max(1));
    let per = n.div_ceil(shards).max(1);
    let files: Vec<PathBuf> = (0..shards).map(|s| shard_path(out_dir, s, opts.gzip)).collect();
    let scorer = Recommender::new(model, opts.normalizer);

    let run = |shard: usize| -> Result<()> {
        let lo = (shard * per).min(n);
        let hi = ((shard + 1) * per).min(n);
        write_shard(&scorer, store, lo..hi, &files[shard], opts.top_k)
    };
    if shards == 1 {
        run(0)?;
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..shards).map(|s| scope.spawn(move || run(s))).collect();
            for h in handles {
                h.join().map_err(|_| Error::Data("cluster worker panicked".into()))??;
            }
            Ok::<_, Error>(())
        })?;
    }
    let seconds = started.elapsed().as_secs_f64();
    let mut output_bytes = 0;
    for f in &files {
        output_bytes += std::fs::metadata(f).map_err(|e| Error::io(f, e))?.len();
    }
    Ok(ClusterSummary {
        entities: n,
        types: model.len(),
        top_k: opts.top_k,
        files,
        output_bytes,
        seconds,
        entities_per_second: if seconds > 0.0 { n as f64 / seconds } else { 0.0 },
    })
}

fn write_shard(
    scorer: &Recommender<'_>,
    store: &EntityEmbeddingStore,
    rows: std::ops::Range<usize>,
    path: &Path,
    top_k: usize,
) -> Result<()> {
    let mut w = create_writer(path)?;
    let mut buf: Vec<u8> = Vec::with_capacity(FLUSH_BYTES + 4096);
    for row in rows {
        let list = scorer.score_types(store.row(row))?;
        let line = Line {
            entity: store.id(row),
            types: list
                .entries
                .iter()
                .take(top_k)
                .map(|e| (scorer.type_iri(e.type_id), e.probability))
                .collect(),
        };
        serde_json::to_writer(&mut buf, &line).map_err(|e| Error::io(path, e.into()))?;
        buf.push(b'\n');
        if buf.len() >= FLUSH_BYTES {
            w.write_all(&buf).map_err(|e| Error::io(path, e))?;
            buf.clear();
        }
    }
    w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}
